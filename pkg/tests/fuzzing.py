"""Malformed-document generator shared by the parser tests."""

from __future__ import annotations

import random

JUNK = ["", " ", "#", ":", "@", "/", "0", "-1", "1/0", "inf", "3/2", "e1@", "@1/2", "v9", "edge", "chip", "on", "x" * 40, "\t", "é", "\x00"]


def mutate(text: str, rng: random.Random) -> str:
    """Apply one to three random token or line edits to ``text``."""
    lines = text.split("\n")
    for _ in range(rng.randint(1, 3)):
        i = rng.randrange(len(lines))
        toks = lines[i].split(" ")
        op = rng.randrange(6)
        if op == 0:
            toks[rng.randrange(len(toks))] = rng.choice(JUNK)
        elif op == 1:
            del lines[i]
            if not lines:
                lines = [""]
            continue
        elif op == 2:
            lines.insert(i, lines[rng.randrange(len(lines))])
            continue
        elif op == 3:
            toks.insert(rng.randrange(len(toks) + 1), rng.choice(JUNK))
        elif op == 4 and len(toks) > 1:
            del toks[rng.randrange(len(toks))]
        else:
            s = lines[i]
            k = rng.randrange(len(s) + 1)
            lines[i] = s[:k] + rng.choice(JUNK) + s[k:]
            continue
        lines[i] = " ".join(toks)
    return "\n".join(lines)
