"""Generate tests/data/tr_sample.conllu, a Turkish-like treebank in UD format.

The file is committed; rerunning this script reproduces it byte for byte.
Every sentence is a valid, projective tree with canonical FEATS, so the
validator reports nothing on it. Multiword tokens (copula clitics),
SpaceAfter=No, XPOS, enhanced DEPS and document comments all occur.

    python3 tests/data/make_corpus.py [n_sentences] > tests/data/tr_sample.conllu
"""

import random
import sys

SEED = 20240617

FIRST_SENTENCE = """# newdoc id = tr-sample-doc1
# sent_id = tr_sample-0001
# text = Sel sularında neler yoktu ki...
1\tSel\tsel\tNOUN\tNoun\tCase=Nom|Number=Sing|Person=3\t2\tnmod:poss\t_\t_
2\tsularında\tsu\tNOUN\tNoun\tCase=Loc|Number=Plur|Number[psor]=Sing|Person=3|Person[psor]=3\t4\tobl\t_\t_
3\tneler\tne\tPRON\tQuesp\tCase=Nom|Number=Plur|Person=3|PronType=Int\t4\tnsubj\t_\t_
4-5\tyoktu\t_\t_\t_\t_\t_\t_\t_\t_
4\tyok\tyok\tADJ\tAdj\tPolarity=Neg\t0\troot\t_\t_
5\ttu\ti\tAUX\tZero\tAspect=Perf|Evident=Fh|Mood=Ind|Number=Sing|Person=3|Tense=Past\t4\tcop\t_\t_
6\tki\tki\tPART\tPart\t_\t4\tdiscourse\t_\tSpaceAfter=No
7\t...\t...\tPUNCT\tPunc\t_\t4\tpunct\t_\t_

"""

# lemma, (front vowel harmony?, rounded?)
NOUNS = ["ev", "kitap", "okul", "çocuk", "kadın", "adam", "şehir", "deniz", "göl", "yol",
         "kapı", "masa", "bahçe", "köy", "ağaç", "kuş", "öğretmen", "doktor", "mektup", "gazete",
         "su", "ekmek", "para", "iş", "gün", "yıl", "dağ", "orman", "ülke", "dünya", "müzik",
         "film", "oda", "pencere", "sokak", "araba", "tren", "gemi", "haber", "soru"]
PROPNS = ["Ali", "Ayşe", "Mehmet", "Zeynep", "Ankara", "İstanbul", "İzmir", "Elif", "Can", "Deniz"]
ADJS = ["büyük", "küçük", "güzel", "eski", "yeni", "uzun", "kısa", "sıcak", "soğuk", "temiz",
        "kirli", "mavi", "yeşil", "genç", "yaşlı", "zor", "kolay"]
ADVS = ["dün", "bugün", "yarın", "hemen", "çok", "yine", "şimdi", "sonra", "erken", "geç"]
VERBS = ["gel", "git", "oku", "yaz", "gör", "bul", "al", "ver", "bekle", "sev", "iste", "bil",
         "anla", "sor", "aç", "kapat", "yap", "konuş", "düşün", "çalış"]
LVC_NOUNS = ["yardım", "telefon", "dikkat", "kabul", "teşekkür", "dans"]
DETS = [("bu", "Dem"), ("şu", "Dem"), ("o", "Dem"), ("bir", "Art"), ("her", "Tot")]

FRONT = set("eiöü")
BACK = set("aıou")


def last_vowel(word):
    for ch in reversed(word):
        if ch in FRONT or ch in BACK:
            return ch
    return "e"


def harmony2(word):
    return "e" if last_vowel(word) in FRONT else "a"


def harmony4(word):
    v = last_vowel(word)
    return {"e": "i", "i": "i", "ö": "ü", "ü": "ü", "a": "ı", "ı": "ı", "o": "u", "u": "u"}[v]


def ends_vowel(word):
    return word[-1] in FRONT or word[-1] in BACK


HARD = set("çfhkpsşt")


def inflect_noun(lemma, case, plural, proper=False):
    stem = lemma
    if plural:
        stem += "l" + harmony2(stem) + "r"
    sep = "'" if proper else ""
    if case == "Nom":
        return stem
    if case == "Acc":
        return stem + sep + ("y" if ends_vowel(stem) else "") + harmony4(stem)
    if case == "Dat":
        return stem + sep + ("y" if ends_vowel(stem) else "") + harmony2(stem)
    if case == "Gen":
        return stem + sep + ("n" if ends_vowel(stem) else "") + harmony4(stem) + "n"
    d = "t" if stem[-1] in HARD else "d"
    if case == "Loc":
        return stem + sep + d + harmony2(stem)
    if case == "Abl":
        return stem + sep + d + harmony2(stem) + "n"
    raise ValueError(case)


PERSON_SUFFIX = {("1", "Sing"): "m", ("2", "Sing"): "n", ("3", "Sing"): "",
                 ("1", "Plur"): "k", ("2", "Plur"): "niz", ("3", "Plur"): "l"}


def inflect_verb(lemma, tense, person, number):
    if tense == "Past":
        d = "t" if lemma[-1] in HARD else "d"
        form = lemma + d + harmony4(lemma)
        suffix = PERSON_SUFFIX[(person, number)]
        if suffix == "l":
            suffix = "l" + harmony2(form) + "r"
        elif suffix == "niz":
            suffix = "n" + harmony4(form) + "z"
        return form + suffix
    # Fut
    form = lemma + ("y" if ends_vowel(lemma) else "") + harmony2(lemma) + "c" + harmony2(lemma) + "k"
    if (person, number) == ("3", "Sing"):
        return form
    if (person, number) == ("3", "Plur"):
        return form + "l" + harmony2(form) + "r"
    softened = form[:-1] + "ğ"
    return {("1", "Sing"): softened + harmony4(form) + "m",
            ("2", "Sing"): form + "s" + harmony4(form) + "n",
            ("1", "Plur"): softened + harmony4(form) + "z",
            ("2", "Plur"): form + "s" + harmony4(form) + "n" + harmony4(form) + "z"}[(person, number)]


def feats(**kv):
    if not kv:
        return "_"
    items = sorted(kv.items(), key=lambda item: (item[0].lower(), item[0]))
    return "|".join(f"{k}={v}" for k, v in items)


class Builder:
    """Accumulates tokens; heads are symbolic until finish()."""

    def __init__(self):
        self.tokens = []  # dicts
        self.mwts = []    # (first_index, form)

    def add(self, form, lemma, upos, xpos, fts, head, deprel):
        self.tokens.append(dict(form=form, lemma=lemma, upos=upos, xpos=xpos, feats=fts,
                                head=head, deprel=deprel, misc=[]))
        return len(self.tokens) - 1


def noun_phrase(rng, b, case, role, head_ref, allow_mods=True):
    """Adds an NP and returns the index of its head noun."""
    if rng.random() < 0.2:
        lemma = rng.choice(PROPNS)
        return b.add(inflect_noun(lemma, case, False, proper=True), lemma, "PROPN", "Prop",
                     feats(Case=case, Number="Sing", Person="3"), head_ref, role)
    mods = []
    if allow_mods and rng.random() < 0.25:
        lemma, pron_type = rng.choice(DETS)
        mods.append(b.add(lemma, lemma, "DET", "Det", feats(PronType=pron_type), None, "det"))
    if allow_mods and rng.random() < 0.35:
        adj = rng.choice(ADJS)
        mods.append(b.add(adj, adj, "ADJ", "Adj", "_", None, "amod"))
    lemma = rng.choice(NOUNS)
    plural = rng.random() < 0.25
    idx = b.add(inflect_noun(lemma, case, plural), lemma, "NOUN", "Noun",
                feats(Case=case, Number="Plur" if plural else "Sing", Person="3"), head_ref, role)
    for m in mods:
        b.tokens[m]["head"] = ("tok", idx)
    return idx


def make_sentence(rng, number):
    b = Builder()
    ROOT = ("root",)

    def to_root():
        return ("fwd",)  # resolved to the root token later

    if rng.random() < 0.3:
        adv = rng.choice(ADVS)
        b.add(adv, adv, "ADV", "Adverb", "_", to_root(), "advmod")

    person = rng.choice(["1", "2", "3", "3", "3"])
    num = rng.choice(["Sing", "Sing", "Plur"])
    if person == "3" and rng.random() < 0.85:
        subj = noun_phrase(rng, b, "Nom", "nsubj", to_root())
        if rng.random() < 0.15:
            cc = b.add("ve", "ve", "CCONJ", "Conj", "_", None, "cc")
            other = rng.choice(PROPNS)
            conj = b.add(other, other, "PROPN", "Prop", feats(Case="Nom", Number="Sing", Person="3"),
                         ("tok", subj), "conj")
            b.tokens[cc]["head"] = ("tok", conj)

    if rng.random() < 0.6:
        case = rng.choice(["Loc", "Abl", "Dat"])
        noun_phrase(rng, b, case, "obl", to_root())

    copular = rng.random() < 0.15
    if not copular and rng.random() < 0.55:
        if rng.random() < 0.3:
            owner_lemma = rng.choice(NOUNS)
            owner = b.add(inflect_noun(owner_lemma, "Gen", False), owner_lemma, "NOUN", "Noun",
                          feats(Case="Gen", Number="Sing", Person="3"), None, "nmod:poss")
            obj = noun_phrase(rng, b, "Acc", "obj", to_root(), allow_mods=False)
            b.tokens[owner]["head"] = ("tok", obj)
        else:
            noun_phrase(rng, b, "Acc", "obj", to_root())

    if copular:
        # noun + past copula written as one word: "evdeydi" = "evde" + "ydi"
        lemma = rng.choice(NOUNS)
        host = inflect_noun(lemma, "Loc", False)
        clitic = ("y" if ends_vowel(host) else "") + "d" + harmony4(host)
        first = b.add(host, lemma, "NOUN", "Noun", feats(Case="Loc", Number="Sing", Person="3"),
                      ROOT, "root")
        b.add(clitic, "i", "AUX", "Zero",
              feats(Aspect="Perf", Evident="Fh", Mood="Ind", Number="Sing", Person="3", Tense="Past"),
              ("tok", first), "cop")
        b.mwts.append((first, host + clitic))
        root = first
    else:
        if rng.random() < 0.12:
            noun = rng.choice(LVC_NOUNS)
            b.add(noun, noun, "NOUN", "Noun", feats(Case="Nom", Number="Sing", Person="3"),
                  to_root(), "compound:lvc")
            verb = "et"
            tense = "Past"
            form = {"1": {"Sing": "ettim", "Plur": "ettik"}, "2": {"Sing": "ettin", "Plur": "ettiniz"},
                    "3": {"Sing": "etti", "Plur": "ettiler"}}[person][num]
        else:
            verb = rng.choice(VERBS)
            tense = rng.choice(["Past", "Fut"])
            form = inflect_verb(verb, tense, person, num)
        fts = dict(Aspect="Perf", Mood="Ind", Number=num, Person=person, Polarity="Pos", Tense=tense)
        if tense == "Fut":
            fts["Aspect"] = "Prosp"
        else:
            fts["Evident"] = "Fh"
        root = b.add(form, verb, "VERB", "Verb", feats(**fts), ROOT, "root")

    punct = rng.choice([".", ".", ".", "!", "...", "?"])
    b.add(punct, punct, "PUNCT", "Punc", "_", ("tok", root), "punct")

    # Resolve symbolic heads to 1-based ids.
    ids = {}
    next_id = 1
    for i in range(len(b.tokens)):
        ids[i] = next_id
        next_id += 1
    for t in b.tokens:
        h = t["head"]
        if h == ROOT:
            t["head"] = 0
        elif h == ("fwd",):
            t["head"] = ids[root]
        else:
            t["head"] = ids[h[1]]

    # The word before the final punctuation is glued to it.
    last_word = len(b.tokens) - 2
    mwt_of = {first: form for first, form in b.mwts}
    mwt_misc = {}
    if last_word - 1 in mwt_of:
        mwt_misc[last_word - 1] = ["SpaceAfter=No"]
    else:
        b.tokens[last_word]["misc"].append("SpaceAfter=No")

    def capitalize(word):
        return ("İ" + word[1:]) if word[0] == "i" else word[0].upper() + word[1:]

    b.tokens[0]["form"] = capitalize(b.tokens[0]["form"])
    if 0 in mwt_of:
        mwt_of[0] = capitalize(mwt_of[0])

    with_deps = number % 7 == 0
    words = []
    skip = set()
    for i, t in enumerate(b.tokens):
        if i in skip:
            continue
        if i in mwt_of:
            words.append((mwt_of[i], bool(mwt_misc.get(i))))
            skip.add(i + 1)
        else:
            words.append((t["form"], "SpaceAfter=No" in t["misc"]))
    text = ""
    for form, glued in words:
        text += form + ("" if glued else " ")
    text = text.rstrip(" ")

    lines = []
    if number % 100 == 1:
        lines.append(f"# newdoc id = tr-sample-doc{number // 100 + 1}")
    lines.append(f"# sent_id = tr_sample-{number:04d}")
    lines.append(f"# text = {text}")
    for i, t in enumerate(b.tokens):
        if i in mwt_of:
            misc = "|".join(mwt_misc.get(i, [])) or "_"
            lines.append(f"{ids[i]}-{ids[i] + 1}\t{mwt_of[i]}\t_\t_\t_\t_\t_\t_\t_\t{misc}")
        form = t["form"]
        deps = f"{t['head']}:{t['deprel']}" if with_deps else "_"
        misc = "|".join(t["misc"]) or "_"
        lines.append("\t".join([str(ids[i]), form, t["lemma"], t["upos"], t["xpos"], t["feats"],
                                str(t["head"]), t["deprel"], deps, misc]))
    return "\n".join(lines) + "\n\n"


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 600
    rng = random.Random(SEED)
    out = [FIRST_SENTENCE]
    for number in range(2, n + 1):
        out.append(make_sentence(rng, number))
    sys.stdout.write("".join(out))


if __name__ == "__main__":
    main()
