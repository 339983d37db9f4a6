"""2x2 matrices as a bundle over two points: frames, induced connections and
the rebuilt bundle, printed step by step."""
from pathlib import Path

from qpbkit import load_scenario
from qpbkit.assoc import InducedConnection, SectionFrame
from qpbkit.bundle import CovariantDerivative
from qpbkit.corep import irreducible_set
from qpbkit.reconstruct import Reconstruction

CORPUS = Path(__file__).resolve().parents[1] / "src" / "qpbkit" / "corpus"


def main():
    sc = load_scenario(CORPUS / "m2_z2.toml")
    B = sc.bundle
    print(f"total algebra {B.GM.labels}, rank of beta = {B.beta_rank}, base points = {len(B.points)}")
    hm = sc.horizontal_model()
    D = CovariantDerivative(hm)
    irr = irreducible_set(sc.hopf).members
    for a in irr:
        sf = SectionFrame(hm, a)
        ic = InducedConnection(sf, D)
        print(f"\n[{a.name}] sections: {sf.G.dim}")
        for k, v in sf.frame.describe().items():
            print(f"  {k} = {v}")
        print(f"  nabla coefficients: {ic.coefficients()}")
        print(f"  curvature zero: {ic.curvature().is_zero()}")
    R = Reconstruction(hm, D, irr)
    print("\nrebuilt basis -> original elements")
    for k, v in R.certificate().items():
        print(f"  {k:14} -> {v}")
    bad = [c for c in R.checks() if not c.passed]
    print("reconstruction:", "all checks pass" if not bad else bad[0].witness)


if __name__ == "__main__":
    main()
