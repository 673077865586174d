#!/usr/bin/env python3
"""Regenerates the bundled fixture corpora under data/fixtures/.

The kern corpus holds 20 short folk-style songs exercising the supported kern
subset (phrase markers, rests, ties, dots, accidentals, tonic metadata). The
chant corpus holds arch-shaped, mostly equal-duration phrases in the native
JSONL format. Output is deterministic.
"""
import json
import random
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "fixtures"
MAJOR = [0, 2, 4, 5, 7, 9, 11]
MINOR = [0, 2, 3, 5, 7, 8, 10]
NAMES = ["c", "c#", "d", "e-", "e", "f", "f#", "g", "a-", "a", "b-", "b"]
KEYS = [("C", 0, MAJOR), ("G", 7, MAJOR), ("D", 2, MAJOR), ("F", 5, MAJOR),
        ("B-", 10, MAJOR), ("a", 9, MINOR), ("e", 4, MINOR), ("d", 2, MINOR)]
SIGNATURES = {"C": "", "a": "", "G": "f#", "e": "f#", "D": "f#c#", "F": "b-", "d": "b-", "B-": "b-e-"}


def kern_pitch(midi):
    octave = midi // 12 - 1
    name = NAMES[midi % 12]
    letter, accidental = name[0], name[1:]
    if octave >= 4:
        return letter * (octave - 3) + accidental
    return letter.upper() * (4 - octave) + accidental


def kern_duration(qn):
    for recip, base in [(1, 4), (2, 2), (4, 1), (8, Fraction(1, 2)), (16, Fraction(1, 4))]:
        if qn == base:
            return str(recip)
        if qn == base * Fraction(3, 2):
            return f"{recip}."
    if qn == Fraction(1, 3):
        return "12"
    raise ValueError(qn)


def degree_to_midi(degree, tonic_midi, scale):
    octave, step = divmod(degree, 7)
    return tonic_midi + 12 * octave + scale[step]


def phrase_degrees(rng, length, shape, start):
    degrees = [start]
    peak = rng.randint(length // 3, max(length // 3, 2 * length // 3))
    for i in range(1, length):
        if shape == "arch":
            bias = 0.6 if i <= peak else -0.6
        elif shape == "descending":
            bias = -0.45
        elif shape == "ascending":
            bias = 0.45
        else:
            bias = 0.0
        step = rng.choices([-3, -2, -1, 0, 1, 2, 3], weights=[0.04, 0.12, 0.3, 0.12, 0.3, 0.08, 0.04])[0]
        if rng.random() < abs(bias):
            step = abs(step) if bias > 0 else -abs(step)
        degrees.append(max(-4, min(11, degrees[-1] + step)))
    return degrees


def phrase_rhythm(rng, length, meter):
    cells = {
        "4/4": [[1], [1], [Fraction(1, 2), Fraction(1, 2)], [Fraction(3, 2), Fraction(1, 2)], [2]],
        "3/4": [[1], [1], [2], [Fraction(1, 2), Fraction(1, 2)]],
        "6/8": [[1, Fraction(1, 2)], [Fraction(3, 2)], [Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)]],
    }[meter]
    out = []
    while len(out) < length - 1:
        out.extend(rng.choice(cells))
    out = out[: length - 1]
    out.append(Fraction(2) if meter != "6/8" else Fraction(3, 2))
    return out


def make_song(index, rng):
    key, pc, scale = KEYS[index % len(KEYS)]
    tonic_midi = 60 + pc if pc <= 5 else 48 + pc
    meter = ["4/4", "3/4", "6/8"][index % 3]
    bar_length = {"4/4": 4, "3/4": 3, "6/8": Fraction(3)}[meter]
    lines = [f"!!!OTL: Fixture song {index + 1:02d}", "**kern", "*clefG2",
             f"*k[{SIGNATURES[key]}]", f"*{key}:", f"*M{meter}"]
    position = Fraction(0)
    n_phrases = rng.randint(4, 6)
    tie_done = False
    for p in range(n_phrases):
        length = rng.randint(6, 13)
        shape = rng.choice(["arch", "arch", "descending", "ascending", "free"])
        start = rng.choice([0, 2, 4, 4, -3])
        degrees = phrase_degrees(rng, length, shape, start)
        degrees[-1] = rng.choice([0, 0, 4, 2, 7]) if p == n_phrases - 1 else rng.choice([0, 4, 2, 1, 7])
        if p == n_phrases - 1:
            degrees[-1] = 0
        rhythm = phrase_rhythm(rng, length, meter)
        if index == 7 and p == 1:
            rhythm[1:4] = [Fraction(1, 3)] * 3  # triplet eighths
            rhythm = rhythm[:length]
        for i, (deg, dur) in enumerate(zip(degrees, rhythm)):
            midi = degree_to_midi(deg, tonic_midi, scale)
            if scale is MAJOR and index % 5 == 1 and deg % 7 == 3 and rng.random() < 0.5:
                midi += 1  # raised fourth
            token = kern_duration(dur) + kern_pitch(midi)
            if i == 0:
                token = "{" + token
            if i == length - 1:
                token = token + "}"
            if not tie_done and index % 4 == 2 and p == 2 and i == 2 and dur == 1:
                # split the note into a tie across the beat
                lines.append("[8" + kern_pitch(midi) + ("{" if i == 0 else ""))
                lines.append("8" + kern_pitch(midi) + "]")
                tie_done = True
            else:
                lines.append(token)
            position += dur
            if position % bar_length == 0:
                lines.append("=")
        if p < n_phrases - 1 and index % 3 == 0:
            lines.append("4r")
            position += 1
            if position % bar_length == 0:
                lines.append("=")
    lines.append("==")
    lines.append("*-")
    return "\n".join(lines) + "\n"


def make_chant(index, rng):
    finals = [(62, "D"), (64, "E"), (65, "F"), (67, "G")]
    final, _ = finals[index % len(finals)]
    scale = [0, 2, 3, 5, 7, 9, 10]
    notes, ends = [], []
    for p in range(rng.randint(5, 8)):
        length = rng.randint(6, 14)
        rise = rng.randint(2, 5)
        peak = rng.randint(length // 3, 2 * length // 3)
        degree = rng.choice([0, 0, 1, 2])
        for i in range(length):
            if i == 0:
                pass
            elif i <= peak:
                degree += rng.choice([0, 1, 1, 1, 2]) if degree < rise + 2 else rng.choice([0, -1, 1])
            else:
                degree -= rng.choice([0, 1, 1, 1])
            degree = max(-2, min(8, degree))
            if i == length - 1:
                degree = rng.choice([0, 0, 1, 2])
            octave, step = divmod(degree, 7)
            pitch = final + 12 * octave + scale[step]
            duration = "2" if i == length - 1 else rng.choice(["1", "1", "1", "1", "0.5", "2"])
            notes.append((pitch, duration))
        ends.append(len(notes) - 1)
    return {
        "id": f"chant{index + 1:02d}",
        "pitches": [n[0] for n in notes],
        "durations": [n[1] for n in notes],
        "phrase_ends": ends,
        "tonic": final,
        "source": "chant-fixture",
    }


def main():
    rng = random.Random(20240501)
    kern_dir = ROOT / "kern"
    kern_dir.mkdir(parents=True, exist_ok=True)
    for i in range(20):
        (kern_dir / f"song{i + 1:02d}.krn").write_text(make_song(i, rng))
    chant_dir = ROOT / "chant"
    chant_dir.mkdir(parents=True, exist_ok=True)
    with open(chant_dir / "chant.jsonl", "w") as out:
        for i in range(12):
            out.write(json.dumps(make_chant(i, rng), separators=(",", ":")) + "\n")


if __name__ == "__main__":
    main()
