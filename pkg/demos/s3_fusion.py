"""Irreducible coreps of C(S3) and their fusion table."""
from itertools import combinations_with_replacement

from qpbkit.corep import decompose, irreducible_set, tensor
from qpbkit.groups import symmetric_group
from qpbkit.hopf import function_algebra


def main():
    H = function_algebra(symmetric_group(3))
    irr = irreducible_set(H).members
    print("irreducibles:", ", ".join(f"{c.name} (dim {c.dim})" for c in irr))
    for a, b in combinations_with_replacement(irr, 2):
        dec = decompose(tensor(a, b), irr)
        parts = " + ".join(f"{m}*{n}" if m > 1 else n for n, m in dec.multiplicities.items() if m)
        print(f"  {a.name} x {b.name} = {parts}")


if __name__ == "__main__":
    main()
