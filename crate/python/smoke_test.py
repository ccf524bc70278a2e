"""End-to-end check of the gasp extension module.

Builds nothing itself: expects `cargo build -p gasp-py` (or --release) to have
produced libgasp.so, which is linked into a temp dir under the importable name.
"""
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def import_gasp():
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "libgasp.so")
        if os.path.exists(lib):
            stage = tempfile.mkdtemp(prefix="gasp-py-")
            shutil.copy(lib, os.path.join(stage, "gasp.so"))
            sys.path.insert(0, stage)
            import gasp
            return gasp
    sys.exit("libgasp.so not found; run `cargo build -p gasp-py` first")


def main():
    gasp = import_gasp()

    mesh = gasp.Mesh.generate("torus", 32)
    assert mesh.is_closed and mesh.euler_characteristic == 0 and mesh.genus == 1, repr(mesh)

    field = mesh.field("z")
    lo, hi = field.range
    assert lo < hi and field.label == "z"

    reeb = gasp.compute_reeb(mesh, field)
    assert reeb.node_count == 4 and reeb.edge_count == 4 and reeb.loops == 1, repr(reeb)
    kinds = sorted(n["kind"] for n in reeb.nodes())
    assert kinds == ["maximum", "minimum", "saddle1", "saddle1"], kinds

    for method in ("gasp-boundary", "gasp-interior", "gb"):
        emb = gasp.embed(mesh, field, reeb, method=method, threads=2)
        assert emb.arc_count == 4, repr(emb)
        for arc in emb.arcs():
            iso = arc["isovalues"]
            assert len(arc["points"]) >= 2
            if method != "gb":
                assert all(a < b for a, b in zip(iso, iso[1:])), (method, iso)
        report = gasp.measure(mesh, field, emb)
        means = report["means"]
        assert 0.0 <= means["outside_ratio"] <= 1.0
        assert means["length_ratio"] >= 1.0
        if method.startswith("gasp"):
            assert means["outside_ratio"] == 0.0, (method, means)
        print(f"{method}: outside={means['outside_ratio']:.4f} "
              f"length_ratio={means['length_ratio']:.4f} "
              f"M={means['smoothness_m']:.4f}")

    # determinism across thread counts
    a = gasp.embed(mesh, field, reeb, method="gasp-interior", threads=1).arcs()
    b = gasp.embed(mesh, field, reeb, method="gasp-interior", threads=8).arcs()
    assert all(x["points"] == y["points"] for x, y in zip(a, b))

    try:
        gasp.embed(mesh, field, reeb, method="nope")
    except ValueError:
        pass
    else:
        raise AssertionError("bad method should raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
