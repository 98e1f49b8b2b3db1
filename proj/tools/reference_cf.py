#!/usr/bin/env python3
"""Regenerate data/b058914.txt.

Locates the fixed point of ?(x) in (2/5, 3/7) by plain bisection on the sign
of ?(x) - x in high-precision binary floating point, then prints the partial
quotients shared by both bisection endpoints in b-file format. This shares no
code with the C++ digit engine and serves as its independent cross-check.

    python3 tools/reference_cf.py --terms 200 > data/b058914.txt
"""
import argparse

import mpmath as mp


def cf_terms(x, limit):
    out = []
    while x != 0 and len(out) < limit:
        y = 1 / x
        a = int(mp.floor(y))
        out.append(a)
        x = y - a
    return out


def question_mark(x, max_sum):
    total = mp.mpf(0)
    s = 0
    sign = 1
    for a in cf_terms(x, max_sum):
        s += a
        if s > max_sum:
            break
        total += sign * mp.ldexp(1, -(s - 1))
        sign = -sign
    return total


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--terms", type=int, default=200)
    ap.add_argument("--bits", type=int, default=4000)
    args = ap.parse_args()

    mp.mp.prec = args.bits
    lo = mp.mpf(2) / 5
    hi = mp.mpf(3) / 7
    for _ in range(args.bits - 200):
        mid = (lo + hi) / 2
        if question_mark(mid, args.bits - 100) - mid < 0:
            lo = mid
        else:
            hi = mid

    a = cf_terms(lo, args.terms + 1)
    b = cf_terms(hi, args.terms + 1)
    common = []
    for u, v in zip(a, b):
        if u != v:
            break
        common.append(u)
    common = common[: args.terms]

    print("# A058914: continued fraction for the smallest fixed point of ?(x) in (0, 1/2).")
    print("# Offline snapshot regenerated by tools/reference_cf.py (bisection at %d bits)." % args.bits)
    print("# Term 0 is the integer part.")
    print("0 0")
    for i, t in enumerate(common, start=1):
        print(i, t)


if __name__ == "__main__":
    main()
