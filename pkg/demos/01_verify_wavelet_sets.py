"""Walkthrough: deciding whether a family of dual-group sets is a wavelet set.

Elements of the group are two-sided digit sequences over {0, ..., p-1};
frequencies live in the dual group and are written in radix-point
notation ("1." pins digit 1 at position 0, ".1" at position 1).  A
wavelet family consists of p - 1 measurable sets; it generates an
orthonormal basis exactly when its contracting dilates tile the dual
group and each member is lattice-translation congruent to the unit cell.
All of that is decided here in exact rational arithmetic.
"""

from vilenkin_wavelets import (
    Cylinder,
    PSet,
    WaveletFamily,
    is_wavelet_set,
    shannon_family,
    theta_ball,
)

# ---------------------------------------------------------------------------
# The Shannon-type family: member u pins digit u at position 0.
# ---------------------------------------------------------------------------
p = 3
family = shannon_family(p)
print(f"Shannon-type family for p={p}:")
for name, member in zip(family.names, family.sets):
    print(f"  {name}: {member.to_json()}  measure {member.measure().exact_string()}")

report = is_wavelet_set(family)
print(f"\noverall verdict: {'PASS' if report.overall else 'FAIL'}")
for record in report.conditions:
    print(f"  {record.name}: {'pass' if record.passed else 'FAIL'}")

# The congruence certificate: each member cut into lattice-translated
# pieces that partition the unit cell.
print("\ncongruence certificate:")
for entry in report.certificate:
    indices = [part["lattice_index"] for part in entry["partition"]]
    print(f"  {entry['set']}: translated by lattice indices {indices}")

# ---------------------------------------------------------------------------
# Break it: shrink one member to the contracted unit cell.
# ---------------------------------------------------------------------------
mutant = family.replace(1, theta_ball(p, 1))
bad = is_wavelet_set(mutant)
print("\nmutant with a measure-1/3 member:")
for record in bad.conditions:
    status = "pass" if record.passed else "FAIL"
    print(f"  {record.name}: {status}")
    for witness in record.witnesses[:2]:
        print(f"    witness: {witness}")

# ---------------------------------------------------------------------------
# Break it differently: pin a digit at a positive position.  Lattice
# translations only touch positions <= 0, so the translated piece can
# never fill the unit cell.
# ---------------------------------------------------------------------------
positive = family.replace(1, PSet(p, [Cylinder(p, 1, ((1, 1),))], validate=False))
bad2 = is_wavelet_set(positive)
congruence = bad2.condition("translation-congruence")
print("\npositive-position mutant, congruence witnesses:")
for witness in congruence.witnesses[:3]:
    print(f"  {witness}")

# ---------------------------------------------------------------------------
# Wavelet sets need not live in a single shell.  This base-2 family
# spreads over three shells (one cell one level coarser, two cells one
# level finer) and still verifies: its pieces translate into the unit
# cell from two different lattice points.
# ---------------------------------------------------------------------------
p2 = 2
spread = WaveletFamily(
    p2,
    ("omega1",),
    (
        PSet(
            p2,
            [
                Cylinder(p2, 1, ((-1, 1), (0, 1))),
                Cylinder(p2, 2, ((0, 1), (1, 1), (2, 1))),
                Cylinder(p2, 2, ((1, 1),)),
            ],
            validate=False,
        ),
    ),
)
spread_report = is_wavelet_set(spread)
print(f"\nthree-shell family verdict: {'PASS' if spread_report.overall else 'FAIL'}")
for entry in spread_report.certificate:
    indices = [part["lattice_index"] for part in entry["partition"]]
    print(f"  {entry['set']}: translated by lattice indices {indices}")
