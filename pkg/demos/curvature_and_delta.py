"""Point-bundle curvature of a bicovariant calculus on C(Z4), computed with
two different embedded differentials."""
from qpbkit.calculus import Exterior, build_fodc, default_delta, delta_witness, point_curvature
from qpbkit.groups import cyclic_group
from qpbkit.hopf import function_algebra
from qpbkit.linalg import Matrix


def main():
    H = function_algebra(cyclic_group(4))
    F = build_fodc(H, [H.basis(H.labels.index("d_g2"))])
    E = Exterior(F, 3)
    print(f"invariant 1-forms: {F.labels}; degree dims {[E.dim(k) for k in range(4)]}")
    d0 = default_delta(E)
    alt = Matrix([[-1, 2], [-1, -1], [-1, -1], [1, 0]])
    print("default delta:", d0.to_strings())
    print("other delta:  ", alt.to_strings(), "admissible" if delta_witness(E, alt) is None else "rejected")
    R0, _ = point_curvature(E)
    R1, _ = point_curvature(E, alt)
    print("curvature (default):", R0.to_strings())
    print("curvature (other):  ", R1.to_strings())
    print("equal:", R0 == R1)


if __name__ == "__main__":
    main()
