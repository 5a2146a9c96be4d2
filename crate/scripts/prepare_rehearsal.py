#!/usr/bin/env python3
"""Build the bundle used by the scaled end-to-end rehearsal test.

Corpus: docstring paragraphs of every Python package installed in the
interpreter's site-packages (public open-source text), deduplicated.
Embeddings: gensim fastText skipgram, trained here and exported to the
plain-text word/n-gram formats read by `ctxspell`.
Lexicon: the English word list shipped with pyspellchecker.

Usage: python3 scripts/prepare_rehearsal.py OUT_DIR [--dim 30]
Requires: gensim, pyspellchecker, Metaphone (for the phonetic reference).
"""
import argparse
import ast
import collections
import gzip
import json
import os
import random
import re
import site
import sys

SPLIT = re.compile(r"[^\w\-]|_")


def tokenize(line):
    out = []
    for raw in SPLIT.split(line.lower()):
        tok = raw.strip("-")
        if tok and all(c.isalpha() or c == "-" for c in tok):
            out.append(tok)
    return out


def docstring_lines(roots):
    seen = set()
    for root in roots:
        for dirpath, dirnames, filenames in os.walk(root):
            dirnames.sort()
            for name in sorted(filenames):
                if not name.endswith(".py"):
                    continue
                try:
                    with open(os.path.join(dirpath, name), encoding="utf-8") as fh:
                        tree = ast.parse(fh.read())
                except Exception:
                    continue
                for node in ast.walk(tree):
                    if not isinstance(node, (ast.Module, ast.FunctionDef, ast.ClassDef, ast.AsyncFunctionDef)):
                        continue
                    doc = ast.get_docstring(node)
                    if not doc:
                        continue
                    for para in re.split(r"\n\s*\n", doc):
                        line = " ".join(para.split())
                        if len(line.split()) < 6 or line in seen:
                            continue
                        seen.add(line)
                        yield line


def write_gz(path, lines):
    with gzip.open(path, "wt", encoding="utf-8", compresslevel=9) as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def fmt(vec):
    return " ".join(f"{x:.4f}" for x in vec)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--dim", type=int, default=30)
    ap.add_argument("--minn", type=int, default=3)
    ap.add_argument("--maxn", type=int, default=4)
    ap.add_argument("--min-count", type=int, default=10)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--gen-lines", type=int, default=6000)
    ap.add_argument("--dm-sample", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=13)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    work = os.path.join(args.out, "work")
    os.makedirs(work, exist_ok=True)

    corpus_path = os.path.join(work, "corpus.txt")
    if not os.path.exists(corpus_path):
        roots = [p for p in site.getsitepackages() if os.path.isdir(p)]
        n_words = 0
        with open(corpus_path, "w", encoding="utf-8") as fh:
            for line in docstring_lines(roots):
                toks = tokenize(line)
                if len(toks) >= 4:
                    fh.write(" ".join(toks) + "\n")
                    n_words += len(toks)
        print(f"corpus: {n_words} tokens", file=sys.stderr)

    with open(corpus_path, encoding="utf-8") as fh:
        lines = [l.split() for l in fh]
    counts = collections.Counter(t for l in lines for t in l)
    n_tokens = sum(counts.values())
    print(f"corpus: {len(lines)} lines, {n_tokens} tokens, {len(counts)} types", file=sys.stderr)

    model_path = os.path.join(work, "ft.model")
    from gensim.models import FastText
    from gensim.models.fasttext_inner import compute_ngrams, ft_hash_bytes

    if os.path.exists(model_path):
        model = FastText.load(model_path)
    else:
        model = FastText(
            vector_size=args.dim, window=5, min_count=args.min_count, sg=1,
            min_n=args.minn, max_n=args.maxn, epochs=args.epochs, workers=1,
            seed=args.seed, bucket=200000,
        )
        model.build_vocab(corpus_iterable=lines)
        model.train(corpus_iterable=lines, total_examples=len(lines), epochs=args.epochs)
        model.save(model_path)
    wv = model.wv
    vocab = sorted(wv.key_to_index)
    print(f"vocab: {len(vocab)}", file=sys.stderr)

    write_gz(os.path.join(args.out, "words.vec.gz"),
             [f"{len(vocab)} {args.dim}"] + [f"{w} {fmt(wv.get_vector(w))}" for w in vocab])

    grams = sorted({g for w in vocab for g in compute_ngrams(w, args.minn, args.maxn)})
    rows = []
    for g in grams:
        h = ft_hash_bytes(g.encode("utf-8")) % wv.bucket
        rows.append(f"{g} {fmt(wv.vectors_ngrams[h])}")
    write_gz(os.path.join(args.out, "ngrams.vec.gz"),
             [f"{len(grams)} {args.dim} {args.minn} {args.maxn}"] + rows)
    print(f"ngrams: {len(grams)}", file=sys.stderr)

    write_gz(os.path.join(args.out, "freqs.tsv.gz"),
             [f"{w}\t{c}" for w, c in sorted(counts.items())])

    from spellchecker import SpellChecker
    lex = sorted({w for w in SpellChecker(language="en").word_frequency.dictionary
                  if tokenize(w) == [w]})
    write_gz(os.path.join(args.out, "lexicon.txt.gz"), lex)
    print(f"lexicon: {len(lex)}", file=sys.stderr)

    rng = random.Random(args.seed)
    sample = rng.sample(range(len(lines)), args.gen_lines)
    write_gz(os.path.join(args.out, "gen_corpus.txt.gz"), [" ".join(lines[i]) for i in sorted(sample)])

    from metaphone import doublemetaphone
    pool = sorted(w for w in vocab if w.isalpha() and w.isascii() and len(w) >= 3)
    words = sorted(rng.sample(pool, args.dm_sample))
    dm_rows = []
    for w in words:
        p, a = doublemetaphone(w)
        dm_rows.append(f"{w}\t{p}\t{a or p}")
    with open(os.path.join(args.out, "dm_reference.tsv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(dm_rows) + "\n")

    meta = dict(dim=args.dim, minn=args.minn, maxn=args.maxn, min_count=args.min_count,
                epochs=args.epochs, seed=args.seed, corpus_tokens=n_tokens,
                corpus_lines=len(lines), vocab=len(vocab), ngrams=len(grams),
                lexicon=len(lex), gen_lines=args.gen_lines)
    with open(os.path.join(args.out, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2)


if __name__ == "__main__":
    main()
