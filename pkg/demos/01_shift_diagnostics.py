"""How far apart are a source and a target distribution?

Walks the two diagnostic numbers the library exposes before any
estimation happens: the likelihood-ratio bound B (how aggressively the
target re-weights source draws) and the source density envelope
(b_lower, b_upper) (how uneven the source coverage is).  Both grow as
the target drifts away from the source, and both feed the truncation
thresholds used later.
"""

from __future__ import annotations

from shiftmoment import PolyFamily, SourceTargetPair, TruncatedNormal, Uniform, density_bounds


def main() -> None:
    print("ratio bound B for tnorm(0.2, 0.3) -> tnorm(mu, 0.3)")
    source = TruncatedNormal(0.0, 1.0, 0.2, 0.3)
    for mu in (0.2, 0.4, 0.6, 0.8):
        pair = SourceTargetPair(source=source, target=TruncatedNormal(0.0, 1.0, mu, 0.3))
        print(f"  mu={mu:.1f}  B={pair.sup_ratio():8.4f}")

    print()
    print("source envelope for the polynomial family (target: uniform)")
    for a in (0.0, 3.0, 7.0, 10.0):
        family = PolyFamily(a)
        lower, upper = density_bounds(family)
        pair = SourceTargetPair(source=family, target=Uniform())
        print(
            f"  a={a:4.1f}  b_lower={lower:6.4f}  b_upper={upper:6.4f}  "
            f"B={pair.sup_ratio():6.4f}"
        )

    print()
    print("the ratio itself, pointwise, for the mu=0.6 pair")
    pair = SourceTargetPair(source=source, target=TruncatedNormal(0.0, 1.0, 0.6, 0.3))
    for x in (0.1, 0.3, 0.5, 0.7, 0.9):
        print(f"  w({x:.1f}) = {pair.likelihood_ratio(x):8.4f}")


if __name__ == "__main__":
    main()
