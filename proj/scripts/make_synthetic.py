#!/usr/bin/env python3
"""Generates the synthetic stand-in corpora under data/synthetic/.

Sentences come from restaurant-review templates. Each sentence is built as a
dependency tree; its constituency tree is the head-outward binarisation of
that dependency tree, and every constituent is labelled 0..4 by a small
compositional sentiment function. Word vectors carry a polarity direction so
that held-out adjectives are still learnable.

Usage: make_synthetic.py [--out data/synthetic] [--seed 7]
"""

import argparse
import json
import os
import random

import numpy as np

DIM = 300

STRONG_POS = ["excellent", "amazing", "outstanding", "fantastic", "wonderful", "perfect",
              "delicious", "incredible"]
MILD_POS = ["good", "nice", "fresh", "friendly", "tasty", "pleasant", "decent", "cozy"]
STRONG_NEG = ["terrible", "awful", "horrible", "disgusting", "inedible", "dreadful"]
MILD_NEG = ["bad", "bland", "slow", "cold", "rude", "mediocre", "stale", "greasy"]
NEUTRAL_ADJ = ["okay", "average", "standard", "typical"]
HELD_POS = ["terrific", "superb", "splendid", "delightful", "lovely", "marvelous"]
HELD_NEG = ["lousy", "appalling", "atrocious", "dismal", "soggy", "sloppy"]

FEEL_POS = ["happy", "satisfied", "impressed", "thrilled", "delighted"]
FEEL_NEG = ["disappointed", "upset", "frustrated", "annoyed", "unhappy"]
HELD_FEEL_POS = ["pleased", "content"]
HELD_FEEL_NEG = ["angry", "furious"]

NOUNS = ["food", "service", "staff", "pasta", "pizza", "sushi", "waiter", "menu", "wine",
         "dessert", "decor", "atmosphere", "price", "portion", "restaurant", "place", "bar",
         "chef", "soup", "salad", "steak", "fish", "burger", "coffee", "bread", "music",
         "owner", "manager", "view", "room", "hotel", "waitress", "table", "kitchen"]
HELD_NOUNS = ["curry", "noodles", "lobster", "bartender", "terrace", "brunch"]
NAMES = [["Golden", "Dragon"], ["Olive", "Tree"], ["Blue", "Door"], ["Red", "Lantern"],
         ["Silver", "Spoon"], ["Green", "Garden"]]
HELD_NAMES = [["Four", "Seasons"], ["Grand", "Palace"]]

VERB_POS = {"loved": 2, "adored": 2, "enjoyed": 1, "liked": 1, "appreciated": 1}
VERB_NEG = {"hated": -2, "despised": -2, "disliked": -1, "regretted": -1}
HELD_VERB = {"cherished": 2, "detested": -2}
NEUTRAL_VERBS = ["ordered", "tried", "visited", "saw", "had", "shared"]
IMPERATIVE = {"go": 1, "try": 1, "visit": 1, "avoid": -1, "skip": -1}
COPULA = ["was", "is"]
DETS = ["the", "this", "that", "our", "my"]
SUBJ_PRONOUNS = ["I", "we", "they"]
INTENSIFIERS = ["very", "really", "truly", "extremely"]

LEMMAS = {"was": "be", "is": "be", "left": "leave", "loved": "love", "adored": "adore",
          "enjoyed": "enjoy", "liked": "like", "appreciated": "appreciate", "hated": "hate",
          "despised": "despise", "disliked": "dislike", "regretted": "regret",
          "ordered": "order", "tried": "try", "visited": "visit", "saw": "see", "had": "have",
          "shared": "share", "went": "go", "brought": "bring", "n't": "not",
          "cherished": "cherish", "detested": "detest", "served": "serve"}

LEXICAL = {}
for w in STRONG_POS:
    LEXICAL[w] = 2
for w in MILD_POS:
    LEXICAL[w] = 1
for w in STRONG_NEG:
    LEXICAL[w] = -2
for w in MILD_NEG:
    LEXICAL[w] = -1
for w in HELD_POS:
    LEXICAL[w] = 2
for w in HELD_NEG:
    LEXICAL[w] = -2
for w in FEEL_POS + HELD_FEEL_POS:
    LEXICAL[w] = 2
for w in FEEL_NEG + HELD_FEEL_NEG:
    LEXICAL[w] = -2
LEXICAL.update(VERB_POS)
LEXICAL.update(VERB_NEG)
LEXICAL.update(HELD_VERB)

EVALUATIVE_RELS = ("acomp", "oprd", "xcomp", "dobj", "attr")


class Node:
    def __init__(self, form, upos, deprel="root", pol=0, left=None, right=None, chunk=False):
        self.form = form
        self.upos = upos
        self.deprel = deprel
        self.pol = pol
        self.left = left or []
        self.right = right or []
        self.chunk = chunk  # heads a noun chunk the tagger would mark

    def children(self):
        return self.left + self.right


def clip(s):
    return max(-2, min(2, s))


def sign(s):
    return (s > 0) - (s < 0)


def sentiment(node, kids=None):
    """Compositional score in -2..2 for `node` with the given dependents."""
    if kids is None:
        kids = node.children()
    rel = {}
    for k in kids:
        rel.setdefault(k.deprel, []).append(k)
    s = node.pol
    if node.upos in ("ADJ",):
        if "advmod" in rel and any(k.form.lower() in INTENSIFIERS for k in rel["advmod"]):
            s = sign(s) * min(2, abs(s) + 1)
        if "neg" in rel and s != 0:
            s = -sign(s)
        if "conj" in rel and "cc" in rel:
            later = sentiment(rel["conj"][-1])
            if later != 0:
                s = later
        return clip(s)
    if node.upos in ("VERB", "AUX"):
        imperative = "nsubj" not in rel and node.form.lower() in IMPERATIVE
        if imperative:
            s = IMPERATIVE[node.form.lower()]
        if s == 0:
            for r in EVALUATIVE_RELS:
                for k in rel.get(r, []):
                    v = sentiment(k)
                    if v != 0:
                        s = v
                        break
                if s != 0:
                    break
        if "neg" in rel and s != 0:
            s = -s
        if s == 0:
            for k in rel.get("advcl", []):
                v = sentiment(k)
                if v != 0:
                    s = v
        if "conj" in rel and "cc" in rel:
            later = sentiment(rel["conj"][-1])
            if later != 0:
                s = later
        return clip(s)
    if node.upos in ("NOUN", "PROPN", "PRON"):
        for k in rel.get("amod", []):
            v = sentiment(k)
            if v != 0:
                s = v
        return clip(s)
    if node.upos == "ADP":
        for k in rel.get("pobj", []):
            v = sentiment(k)
            if v != 0:
                return 0 if abs(v) < 2 else sign(v)
        return 0
    return clip(s)


# ---------------------------------------------------------------------------
# Phrase builders


def leaf(form, upos, deprel, pol=None):
    return Node(form, upos, deprel, LEXICAL.get(form.lower(), 0) if pol is None else pol)


def noun_phrase(rng, deprel, nouns, names, adj_pool=None, det=None, capital=False):
    if names and rng.random() < 0.2:
        words = rng.choice(names)
        det_form = "The" if capital or rng.random() < 0.5 else "the"
        head = Node(words[-1], "PROPN", deprel, 0, chunk=True)
        head.left = [leaf(det_form, "DET", "det")] + [leaf(w, "PROPN", "compound") for w in words[:-1]]
        return head
    head = Node(rng.choice(nouns), "NOUN", deprel, 0, chunk=True)
    d = det or rng.choice(DETS)
    if capital:
        d = d.capitalize()
    head.left = [leaf(d, "DET", "det")]
    if adj_pool and rng.random() < 0.25:
        head.left.append(leaf(rng.choice(adj_pool), "ADJ", "amod"))
    return head


def adjective(rng, pool, deprel, allow_neg=True):
    adj = leaf(rng.choice(pool), "ADJ", deprel)
    r = rng.random()
    if r < 0.3:
        adj.left.append(leaf(rng.choice(INTENSIFIERS), "ADV", "advmod", 0))
    elif allow_neg and r < 0.4 and adj.pol != 0:
        adj.left.append(leaf("not", "PART", "neg", 0))
    return adj


class Lexicon:
    def __init__(self, held_out):
        self.pos = STRONG_POS + MILD_POS + (HELD_POS if held_out else [])
        self.neg = STRONG_NEG + MILD_NEG + (HELD_NEG if held_out else [])
        self.feel_pos = FEEL_POS + (HELD_FEEL_POS if held_out else [])
        self.feel_neg = FEEL_NEG + (HELD_FEEL_NEG if held_out else [])
        self.nouns = NOUNS + (HELD_NOUNS if held_out else [])
        self.names = NAMES + (HELD_NAMES if held_out else [])
        self.verbs = dict(VERB_POS)
        self.verbs.update(VERB_NEG)
        if held_out:
            self.verbs.update(HELD_VERB)

    def polar(self, rng, polarity):
        if polarity > 0:
            return self.pos
        if polarity < 0:
            return self.neg
        return NEUTRAL_ADJ


def copula_clause(rng, lex, polarity, deprel="root", capital=True, as_well_as=False):
    verb = Node(rng.choice(COPULA), "AUX", deprel, 0)
    subj = noun_phrase(rng, "nsubj", lex.nouns, None, capital=capital)
    adj = adjective(rng, lex.polar(rng, polarity), "acomp", allow_neg=polarity != 0)
    if as_well_as:
        adj.right.append(Node("well", "ADV", "advmod", 0, left=[leaf("as", "ADV", "advmod", 0)]))
        prep = leaf("as", "ADP", "prep", 0)
        other = Node(rng.choice(lex.nouns), "NOUN", "pobj", 0)
        if rng.random() < 0.5:
            other.left = [leaf("the", "DET", "det")]
            other.chunk = True
        prep.right.append(other)
        adj.right.append(prep)
    verb.left = [subj]
    verb.right = [adj]
    return verb


def transitive_clause(rng, lex, polarity, deprel="root", capital=True):
    pool = [v for v, p in lex.verbs.items() if sign(p) == sign(polarity)]
    verb = leaf(rng.choice(pool), "VERB", deprel)
    subj = leaf(rng.choice(SUBJ_PRONOUNS), "PRON", "nsubj", 0)
    if capital:
        subj.form = subj.form.capitalize() if subj.form != "I" else "I"
    obj = noun_phrase(rng, "dobj", lex.nouns, lex.names)
    verb.left = [subj]
    verb.right = [obj]
    return verb


def depictive_clause(rng, lex, polarity, deprel="root", capital=True):
    verb = Node("left", "VERB", deprel, 0)
    subj = leaf("I" if rng.random() < 0.6 else ("We" if capital else "we"), "PRON", "nsubj", 0)
    obj = noun_phrase(rng, "dobj", lex.nouns, lex.names, capital=rng.random() < 0.3)
    feel = leaf(rng.choice(lex.feel_pos if polarity > 0 else lex.feel_neg), "ADJ", "oprd")
    if rng.random() < 0.5:
        feel.left.append(leaf(rng.choice(INTENSIFIERS), "ADV", "advmod", 0))
    verb.left = [subj]
    verb.right = [obj, feel]
    return verb


def imperative_clause(rng, lex, polarity):
    verbs = [v for v, p in IMPERATIVE.items()]
    form = rng.choice(verbs)
    base = IMPERATIVE[form]
    negate = sign(base) != sign(polarity)
    verb = Node(form, "VERB", "root", 0)
    if negate:
        verb.left = [leaf("Do", "AUX", "aux", 0), leaf("n't", "PART", "neg", 0)]
    else:
        verb.form = form.capitalize()
    if form == "go":
        prep = leaf("to", "ADP", "prep", 0)
        prep.right = [noun_phrase(rng, "pobj", lex.nouns, None, det=rng.choice(["this", "that"]))]
        verb.right = [prep]
    else:
        verb.right = [noun_phrase(rng, "dobj", lex.nouns, None, det=rng.choice(["this", "that"]))]
    return verb


def neutral_clause(rng, lex, deprel="root", capital=True):
    r = rng.random()
    if r < 0.4:
        verb = leaf(rng.choice(NEUTRAL_VERBS), "VERB", deprel, 0)
        subj = leaf(rng.choice(SUBJ_PRONOUNS), "PRON", "nsubj", 0)
        if capital and subj.form != "I":
            subj.form = subj.form.capitalize()
        verb.left = [subj]
        verb.right = [noun_phrase(rng, "dobj", lex.nouns, lex.names)]
        return verb
    if r < 0.7:
        verb = Node("went", "VERB", deprel, 0)
        subj = leaf(rng.choice(SUBJ_PRONOUNS), "PRON", "nsubj", 0)
        if capital and subj.form != "I":
            subj.form = subj.form.capitalize()
        prep = leaf("to", "ADP", "prep", 0)
        prep.right = [noun_phrase(rng, "pobj", lex.nouns, lex.names)]
        verb.left = [subj]
        verb.right = [prep]
        if rng.random() < 0.5:
            on = leaf("on", "ADP", "prep", 0)
            on.right = [leaf(rng.choice(["Monday", "Friday", "Sunday"]), "PROPN", "pobj", 0)]
            verb.right.append(on)
        return verb
    if r < 0.85:
        verb = Node("brought", "VERB", deprel, 0)
        verb.left = [noun_phrase(rng, "nsubj", ["waiter", "waitress", "owner", "chef"], None,
                                 capital=capital)]
        verb.right = [noun_phrase(rng, "dobj", lex.nouns, None)]
        return verb
    return copula_clause(rng, lex, 0, deprel, capital)


def sentence(rng, lex):
    """Returns (root node, kind)."""
    r = rng.random()
    pol = 1 if rng.random() < 0.5 else -1
    if r < 0.2:
        root = copula_clause(rng, lex, pol, as_well_as=rng.random() < 0.25)
        kind = "copula"
    elif r < 0.33:
        root = transitive_clause(rng, lex, pol)
        kind = "transitive"
    elif r < 0.45:
        root = depictive_clause(rng, lex, pol)
        kind = "depictive"
    elif r < 0.57:
        root = imperative_clause(rng, lex, pol)
        kind = "imperative"
    elif r < 0.72:
        # Concessive clause first, main clause decides.
        first = copula_clause(rng, lex, -pol, "advcl", capital=False,
                              as_well_as=rng.random() < 0.4)
        first.right.append(leaf(",", "PUNCT", "punct", 0))
        main = (depictive_clause if rng.random() < 0.6 else transitive_clause)(
            rng, lex, pol, capital=False)
        main.left = [first, leaf("however", "ADV", "advmod", 0), leaf(",", "PUNCT", "punct", 0)] + main.left
        root = main
        kind = "however"
    elif r < 0.82:
        first = copula_clause(rng, lex, -pol)
        second = copula_clause(rng, lex, pol, "conj", capital=False)
        first.right += [leaf(",", "PUNCT", "punct", 0), leaf("but", "CCONJ", "cc", 0), second]
        root = first
        kind = "but"
    else:
        root = neutral_clause(rng, lex)
        kind = "neutral"
    if kind != "imperative" or rng.random() < 0.5:
        root.right.append(leaf(".", "PUNCT", "punct", 0))
    if root.left:
        first = leftmost(root)
        first.form = first.form[0].upper() + first.form[1:] if first.form[0].isalpha() else first.form
    return root, kind


def leftmost(node):
    while node.left:
        node = node.left[0]
    return node


# ---------------------------------------------------------------------------
# Serialisation


def linearize(node):
    out = []
    for k in node.left:
        out += linearize(k)
    out.append(node)
    for k in node.right:
        out += linearize(k)
    return out


def to_conllu(root, sent_id, chunks):
    order = linearize(root)
    index = {id(n): i + 1 for i, n in enumerate(order)}
    parent = {}

    def walk(n):
        for k in n.children():
            parent[id(k)] = n
            walk(k)
    walk(root)
    tags = {}
    if chunks:
        for n in order:
            tags[id(n)] = "O"
        for n in order:
            if not n.chunk:
                continue
            span = [n] + [k for k in n.left if k.deprel in ("det", "amod", "compound", "poss", "nummod")]
            idx = sorted(index[id(k)] for k in span)
            if idx != list(range(idx[0], idx[-1] + 1)):
                continue
            for j, i in enumerate(idx):
                tags[id(order[i - 1])] = "B" if j == 0 else "I"
    lines = [f"# sent_id = {sent_id}", "# text = " + " ".join(n.form for n in order)]
    for n in order:
        head = index[id(parent[id(n)])] if id(n) in parent else 0
        deprel = n.deprel if head else "root"
        lemma = LEMMAS.get(n.form.lower(), n.form.lower())
        misc = f"Chunk={tags[id(n)]}" if chunks else "_"
        lines.append("\t".join([str(index[id(n)]), n.form, lemma, n.upos, "_", "_", str(head),
                                deprel, "_", misc]))
    return "\n".join(lines) + "\n"


def to_sst(node, root_label=None):
    """Head-outward binarisation: right dependents nearest first, then left."""
    cur = f"({LEXICAL.get(node.form.lower(), 0) + 2} {node.form})"
    steps = [(k, "R") for k in node.right] + [(k, "L") for k in reversed(node.left)]
    used = []
    for i, (k, side) in enumerate(steps):
        used.append(k)
        lab = sentiment(node, used) + 2
        if root_label is not None and i == len(steps) - 1:
            lab = root_label
        cur = f"({lab} {cur} {to_sst(k)})" if side == "R" else f"({lab} {to_sst(k)} {cur})"
    if root_label is not None and not steps:
        cur = f"({root_label} {node.form})"
    return cur


def build_split(rng, lex, n, prefix, noise):
    sst, conllu, kinds = [], [], []
    for i in range(n):
        root, kind = sentence(rng, lex)
        gold = sentiment(root) + 2
        if rng.random() < noise:
            gold = rng.choice([g for g in range(5) if coarse(g) != coarse(gold)])
        sst.append(to_sst(root, gold))
        conllu.append(to_conllu(root, f"{prefix}-{i + 1}", chunks=False))
        kinds.append(kind)
    return sst, conllu, kinds


def coarse(label):
    return 0 if label <= 1 else (1 if label == 2 else 2)


POLARITY_NAME = {-1: "negative", 0: "neutral", 1: "positive"}


def owning_verb(node, parent):
    cur = parent.get(id(node))
    while cur is not None and cur.upos not in ("VERB", "AUX"):
        cur = parent.get(id(cur))
    return cur


def build_absa(rng, lex, n):
    records, parses = [], []
    for i in range(n):
        root, _ = sentence(rng, lex)
        sid = f"absa-{i + 1}"
        order = linearize(root)
        parent = {}

        def walk(x):
            for k in x.children():
                parent[id(k)] = x
                walk(k)
        walk(root)
        text = " ".join(x.form for x in order)
        aspects = []
        for x in order:
            if x.upos not in ("NOUN", "PROPN") or x.deprel == "compound":
                continue
            if x.form in ("Monday", "Friday", "Sunday"):
                continue
            verb = owning_verb(x, parent)
            pol = sign(sentiment(verb)) if verb is not None else 0
            target = " ".join(k.form for k in x.left if k.deprel == "compound") + (" " if any(
                k.deprel == "compound" for k in x.left) else "") + x.form
            aspects.append({"target": target, "polarity": POLARITY_NAME[pol]})
        records.append({"id": sid, "text": text, "aspects": aspects})
        parses.append(to_conllu(root, sid, chunks=True))
    return records, parses


# ---------------------------------------------------------------------------
# Embeddings

FIXTURE_WORDS = ("the food was excellent as well as service , however , i left the four seasons "
                 "very disappointed . is outstanding good but not do n't go to this place").split()


def embeddings(vocab_pos, seed):
    gen = np.random.default_rng(seed)
    pol_dir = gen.normal(0, 1, DIM)
    pol_dir /= np.linalg.norm(pol_dir)
    neg_dir = gen.normal(0, 1, DIM)
    neg_dir /= np.linalg.norm(neg_dir)
    int_dir = gen.normal(0, 1, DIM)
    int_dir /= np.linalg.norm(int_dir)
    pos_dirs = {}
    out = []
    for word in sorted(vocab_pos):
        upos = vocab_pos[word]
        if upos not in pos_dirs:
            d = gen.normal(0, 1, DIM)
            pos_dirs[upos] = d / np.linalg.norm(d)
    for word in sorted(vocab_pos):
        upos = vocab_pos[word]
        v = gen.normal(0, 0.12, DIM) + 1.2 * pos_dirs[upos]
        v += 0.9 * LEXICAL.get(word, 0) * pol_dir
        if word in ("not", "n't", "never"):
            v += 2.0 * neg_dir
        if word in INTENSIFIERS:
            v += 1.5 * int_dir
        out.append(word + " " + " ".join(f"{x:.5f}" for x in v))
    return "\n".join(out) + "\n"


def collect_vocab(conllu_blocks, vocab):
    for block in conllu_blocks:
        for line in block.splitlines():
            if line.startswith("#") or not line.strip():
                continue
            cols = line.split("\t")
            for w in (cols[1].lower(), cols[2].lower()):
                vocab.setdefault(w, cols[3])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "synthetic"))
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--train", type=int, default=1500)
    ap.add_argument("--dev", type=int, default=300)
    ap.add_argument("--test", type=int, default=300)
    ap.add_argument("--absa", type=int, default=300)
    ap.add_argument("--noise", type=float, default=0.08)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    rng = random.Random(args.seed)
    train_lex, eval_lex = Lexicon(False), Lexicon(True)
    splits = {
        "train": build_split(rng, train_lex, args.train, "train", args.noise),
        "dev": build_split(rng, eval_lex, args.dev, "dev", args.noise),
        "test": build_split(rng, eval_lex, args.test, "test", args.noise),
    }
    absa_records, absa_parses = build_absa(rng, eval_lex, args.absa)

    vocab = {}
    for name, (sst, conllu, _) in splits.items():
        with open(os.path.join(args.out, f"sst_{name}.txt"), "w") as f:
            f.write("\n".join(sst) + "\n")
        with open(os.path.join(args.out, f"sst_{name}.conllu"), "w") as f:
            f.write("\n".join(conllu))
        collect_vocab(conllu, vocab)
    with open(os.path.join(args.out, "absa.jsonl"), "w") as f:
        for r in absa_records:
            f.write(json.dumps(r) + "\n")
    with open(os.path.join(args.out, "absa.conllu"), "w") as f:
        f.write("\n".join(absa_parses))
    collect_vocab(absa_parses, vocab)
    fixture_pos = {"the": "DET", "food": "NOUN", "was": "AUX", "excellent": "ADJ", "as": "ADP",
                   "well": "ADV", "service": "NOUN", ",": "PUNCT", "however": "ADV", "i": "PRON",
                   "left": "VERB", "four": "PROPN", "seasons": "PROPN", "very": "ADV",
                   "disappointed": "ADJ", ".": "PUNCT", "is": "AUX", "outstanding": "ADJ",
                   "good": "ADJ", "but": "CCONJ", "not": "PART", "do": "AUX", "n't": "PART",
                   "go": "VERB", "to": "ADP", "this": "DET", "place": "NOUN"}
    for w in FIXTURE_WORDS:
        vocab.setdefault(w, fixture_pos[w])
    with open(os.path.join(args.out, "embeddings.txt"), "w") as f:
        f.write(embeddings(vocab, args.seed))


if __name__ == "__main__":
    main()
