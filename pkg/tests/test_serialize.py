import numpy as np
import pytest

from pfsdm import serialize
from pfsdm.errors import InputFormatError
from pfsdm.moments import MomentCurves, default_r_grid, distance_matrix, normalizing_constants
from pfsdm.polybasis import PolySurrogate
from pfsdm.shapes import generate_shape


def random_curves(rng, shape_id):
    vals = np.abs(rng.normal(0, 1, (3, 16)))
    vals[2] = rng.normal(0, 1, 16)
    return MomentCurves(shape_id, default_r_grid(16), vals)


class TestContourCsv:
    def test_round_trip_exact(self, tmp_path):
        c = generate_shape("folded", 128, 0)
        path = tmp_path / "c.csv"
        serialize.write_contour_csv(path, c)
        back = serialize.read_contour_csv(path)
        assert np.array_equal(back.points, c.points)

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\nnope\n")
        with pytest.raises(InputFormatError):
            serialize.read_contour_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFormatError):
            serialize.read_contour_csv(tmp_path / "absent.csv")


class TestJsonArtifacts:
    def test_poly_round_trip(self):
        rng = np.random.default_rng(0)
        p = PolySurrogate(4, rng.standard_normal((5, 5)))
        back = serialize.poly_from_dict(serialize.poly_to_dict(p))
        assert np.array_equal(back.coeffs, p.coeffs)

    def test_field_bundle_round_trip(self, tmp_path, five_fields):
        f = five_fields["circle"]
        path = tmp_path / "bundle.json"
        serialize.write_json(path, serialize.field_to_dict(f))
        back = serialize.field_from_dict(serialize.read_json(path))
        assert np.array_equal(back.sdf.poly.coeffs, f.sdf.poly.coeffs)
        assert np.array_equal(back.deformation.disp_x.coeffs, f.deformation.disp_x.coeffs)
        assert back.sdf.boundary_rms == f.sdf.boundary_rms
        assert back.contour_id == f.contour_id

    def test_seventeen_digit_floats(self, tmp_path):
        path = tmp_path / "x.json"
        serialize.write_json(path, {"v": 0.1})
        assert "0.10000000000000001" in path.read_text()

    def test_unknown_basis(self):
        with pytest.raises(InputFormatError):
            serialize.poly_from_dict({"basis": "monomial", "degree": 2, "coeffs": [0] * 9})


class TestMomentsCsv:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        mc = random_curves(rng, "x")
        path = tmp_path / "m.csv"
        serialize.write_moments_csv(path, mc)
        back = serialize.read_moments_csv(path)
        assert np.array_equal(back.values, mc.values)
        assert np.array_equal(back.r_grid, mc.r_grid)
        assert back.shape_id == "m"

    def test_header_required(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("0.1,0.2\n")
        with pytest.raises(InputFormatError):
            serialize.read_moments_csv(path)


class TestDistmatCsv:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(2)
        curves = [random_curves(rng, f"s{i}") for i in range(4)]
        consts = normalizing_constants(curves)
        d = distance_matrix(curves, consts, 3)
        path = tmp_path / "d.csv"
        serialize.write_distmat_csv(path, d)
        back = serialize.read_distmat_csv(path)
        assert back.shape_ids == d.shape_ids
        assert np.array_equal(back.values, d.values)

    def test_id_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,a,b\nwrong,0,1\nb,1,0\n")
        with pytest.raises(InputFormatError):
            serialize.read_distmat_csv(path)


class TestAtomicWrite:
    def test_no_temp_left_behind(self, tmp_path):
        path = tmp_path / "out.txt"
        serialize.write_text_atomic(path, "hello\n")
        assert path.read_text() == "hello\n"
        assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]

    def test_overwrite(self, tmp_path):
        path = tmp_path / "out.txt"
        serialize.write_text_atomic(path, "one\n")
        serialize.write_text_atomic(path, "two\n")
        assert path.read_text() == "two\n"
