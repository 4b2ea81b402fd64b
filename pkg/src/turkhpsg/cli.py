"""Command line: parse sentences, inspect lexical closure, run regression corpora."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import GrammarError
from .grammar import ENV_VAR, load_grammar
from .parser import Parser, bracket, render_tree, tokenize, trees
from .tfs import render_avm, to_json

OK, NO_PARSE, ERROR = 0, 1, 2
TREE_LIMIT = 50  # derivation trees shown per parse


def _grammar(ctx, max_edges=None, depth=None):
    try:
        g = load_grammar(ctx.obj.get("grammar"))
    except (GrammarError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(ERROR)
    return g.with_limits(max_edges, depth)


@click.group()
@click.option("--grammar", "grammar", envvar=ENV_VAR, type=click.Path(file_okay=False),
              help=f"Grammar bundle directory (default: bundled grammar; env {ENV_VAR}).")
@click.pass_context
def main(ctx, grammar):
    """HPSG parser for Turkish."""
    ctx.ensure_object(dict)
    ctx.obj["grammar"] = grammar


@main.command("parse")
@click.argument("sentence")
@click.option("--all", "show_all", is_flag=True, help="Show every parse, not just the first.")
@click.option("--tree", is_flag=True, help="Print derivation trees.")
@click.option("--avm", is_flag=True, help="Print attribute-value matrices (default).")
@click.option("--json", "as_json", is_flag=True, help="Print structured JSON.")
@click.option("--max-edges", type=click.IntRange(min=1), default=None)
@click.option("--depth", type=click.IntRange(min=0), default=None, help="Lexical rule depth.")
@click.option("--trace", is_flag=True, help="Log every edge to stderr as it enters the chart.")
@click.pass_context
def parse_cmd(ctx, sentence, show_all, tree, avm, as_json, max_edges, depth, trace):
    """Parse SENTENCE; exit 0 if it is a sentence, 1 if not, 2 on error."""
    g = _grammar(ctx, max_edges, depth)
    log = None
    if trace:
        def log(e):
            click.echo(f"edge {e.id:>4} {e.start}-{e.end} {e.rule:<13} "
                       f"{e.fs.sort_at('synsem|local|cat|head')} {e.label}", err=True)
    try:
        result = Parser(g, log).parse(tokenize(sentence))
    except GrammarError as e:
        click.echo(f"error: {e}", err=True)
        ctx.exit(ERROR)
    edges = result.sentences if show_all else result.sentences[:1]
    if as_json:
        out = {
            "sentence": sentence,
            "tokens": result.tokens,
            "count": len(result.sentences),
            "parses": [{"trees": [bracket(t) for t in trees(e, TREE_LIMIT)], "fs": to_json(e.fs)}
                       for e in edges],
        }
        click.echo(json.dumps(out, ensure_ascii=False, indent=1))
    else:
        click.echo(f"{len(result.sentences)} parse(s) for: {' '.join(result.tokens)}")
        for k, e in enumerate(edges, 1):
            click.echo(f"--- parse {k}")
            if tree:
                for t in trees(e, TREE_LIMIT):
                    click.echo(render_tree(t))
            if avm or not tree:
                click.echo(render_avm(e.fs))
    ctx.exit(OK if result.sentences else NO_PARSE)


def read_corpus(text: str) -> list[tuple[str, str, int]]:
    """(expectation, sentence, line) items; expectation is OK, NO or N=<k>."""
    items = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        tag, sep, sentence = line.partition("\t")
        tag = tag.strip()
        valid = tag in ("OK", "NO") or (tag.startswith("N=") and tag[2:].isdigit())
        if not sep or not sentence.strip() or not valid:
            raise ValueError(f"line {n}: expected OK, NO or N=<k>, a tab, then a sentence")
        items.append((tag, sentence.strip(), n))
    return items


def check_item(parser: Parser, tag: str, sentence: str) -> tuple[bool, int]:
    n = len(parser.parse(tokenize(sentence)))
    if tag == "OK":
        return n > 0, n
    if tag == "NO":
        return n == 0, n
    return n == int(tag[2:]), n


@main.command("corpus")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-edges", type=click.IntRange(min=1), default=None)
@click.pass_context
def corpus_cmd(ctx, path, max_edges):
    """Check every item of a corpus file; exit 0 iff all pass."""
    g = _grammar(ctx, max_edges)
    try:
        items = read_corpus(Path(path).read_text(encoding="utf-8"))
    except ValueError as e:
        click.echo(f"error: {path}: {e}", err=True)
        ctx.exit(ERROR)
    parser = Parser(g)
    failed = 0
    for tag, sentence, line in items:
        try:
            ok, n = check_item(parser, tag, sentence)
            got = str(n)
        except GrammarError as e:
            ok, got = False, f"error: {e}"
        failed += not ok
        click.echo(f"{'PASS' if ok else 'FAIL'}  {tag:<4} {sentence}  ({got})")
    click.echo(f"{len(items) - failed}/{len(items)} passed")
    ctx.exit(OK if failed == 0 else NO_PARSE)


@main.command("lexicon")
@click.argument("token")
@click.option("--depth", type=click.IntRange(min=0), default=None, help="Lexical rule depth.")
@click.pass_context
def lexicon_cmd(ctx, token, depth):
    """Show every lexical entry for TOKEN with its derivation."""
    g = _grammar(ctx, depth=depth)
    entries = g.lexicon.entries(token, g.limits.depth)
    if not entries:
        click.echo(f"no entry for {token!r}", err=True)
        ctx.exit(NO_PARSE)
    for k, e in enumerate(entries, 1):
        chain = " → ".join([e.base] + list(e.rules))
        click.echo(f"--- entry {k}: {chain}")
        click.echo(render_avm(e.fs))
    ctx.exit(OK)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
