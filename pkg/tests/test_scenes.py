"""Scene file loading, schema validation, and round-trip tests."""

import json
import math

import pytest

from srlab import scenes as sc
from srlab.errors import ImmersionError, SceneError
from srlab.measures import QuadratureSpec

TWO_PI = 2.0 * math.pi


def annulus_config():
    return {
        "model": {"builtin": "heisenberg"},
        "surface": {
            "phi": ["u", "v", "0"],
            "domain": {"u": [-3.0, 3.0], "v": [-3.0, 3.0]},
        },
        "region": {
            "type": "annulus",
            "center": [0.0, 0.0],
            "radii": [1.0, 2.0],
            "euler_characteristic": 0,
        },
        "boundary": [
            {"curve": ["2*cos(t)", "2*sin(t)"], "t": [0.0, TWO_PI]},
            {"curve": ["cos(-t)", "sin(-t)"], "t": [0.0, TWO_PI]},
        ],
    }


class TestBuiltinScenes:
    @pytest.mark.parametrize("name", sc.BUILTIN_SCENES)
    def test_loads_and_validates(self, name):
        scene = sc.builtin_scene(name)
        assert scene.name == name
        assert scene.quadrature == QuadratureSpec()
        assert scene.L_grid == (100.0, 1000.0, 10000.0)

    def test_annulus_shape(self):
        scene = sc.builtin_scene("heisenberg_annulus")
        assert scene.region.kind == "annulus"
        assert scene.region.chi == 0
        assert len(scene.boundary) == 2

    def test_disk_shape(self):
        scene = sc.builtin_scene("rt_disk")
        assert scene.region.kind == "disk"
        assert scene.region.chi == 1
        assert len(scene.boundary) == 1
        assert scene.region.center == (0.0, 1.5)

    def test_unknown_builtin(self):
        with pytest.raises(SceneError, match="shipped scenes"):
            sc.builtin_scene("nope")


class TestRoundTrip:
    def test_write_then_load_is_identical(self, tmp_path):
        scene = sc.builtin_scene("heisenberg_annulus")
        path = tmp_path / "copy.json"
        sc.write_scene(scene, path)
        again = sc.load_scene(path)
        assert again.config == scene.config
        assert again.region == scene.region
        assert again.quadrature == scene.quadrature
        assert again.L_grid == scene.L_grid
        assert again.tolerances == scene.tolerances

    def test_load_from_config_dict(self):
        scene = sc.scene_from_config(annulus_config(), name="adhoc")
        assert scene.name == "adhoc"
        assert scene.region.chi == 0

    def test_resolve_by_name_and_path(self, tmp_path):
        assert sc.resolve_scene("rt_disk").name == "rt_disk"
        path = tmp_path / "own.json"
        with open(path, "w") as fh:
            json.dump(annulus_config(), fh)
        assert sc.resolve_scene(str(path)).name == "own"
        with pytest.raises(SceneError, match="no scene named"):
            sc.resolve_scene("missing_scene")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(SceneError, match="invalid JSON"):
            sc.load_scene(path)


class TestSchemaErrors:
    """Every schema violation names the offending field path."""

    def check(self, mutate, fragment):
        cfg = annulus_config()
        mutate(cfg)
        with pytest.raises(SceneError) as err:
            sc.scene_from_config(cfg)
        assert fragment in str(err.value)

    def test_missing_surface(self):
        self.check(lambda c: c.pop("surface"), "$.surface")

    def test_missing_model(self):
        self.check(lambda c: c.pop("model"), "$.model")

    def test_unknown_top_level_key(self):
        self.check(lambda c: c.update(extra=1), "unknown fields: extra")

    def test_unknown_model(self):
        self.check(lambda c: c["model"].update(builtin="nope"), "$.model.builtin")

    def test_model_needs_builtin_or_frame(self):
        self.check(lambda c: c.update(model={}), "$.model")

    def test_phi_arity(self):
        self.check(lambda c: c["surface"].update(phi=["u", "v"]), "$.surface.phi")

    def test_phi_parse_error(self):
        self.check(lambda c: c["surface"].update(phi=["u", "v", "1 +"]), "$.surface.phi")

    def test_missing_domain(self):
        self.check(lambda c: c["surface"].pop("domain"), "$.surface.domain")

    def test_empty_domain_interval(self):
        self.check(lambda c: c["surface"]["domain"].update(u=[2.0, 2.0]),
                   "$.surface.domain.u")

    def test_unknown_region_type(self):
        self.check(lambda c: c["region"].update(type="blob"), "$.region.type")

    def test_chi_mismatch(self):
        self.check(lambda c: c["region"].update(euler_characteristic=1),
                   "$.region.euler_characteristic")

    def test_chi_must_be_integer(self):
        self.check(lambda c: c["region"].update(euler_characteristic=0.5),
                   "$.region.euler_characteristic")

    def test_bad_radii(self):
        self.check(lambda c: c["region"].update(radii=[2.0, 1.0]), "$.region")

    def test_curve_arity(self):
        self.check(lambda c: c["boundary"][0].update(curve=["cos(t)"]),
                   "$.boundary[0].curve")

    def test_curve_interval(self):
        self.check(lambda c: c["boundary"][1].update(t=[1.0, 1.0]),
                   "$.boundary[1].t")

    def test_curve_expression_not_string(self):
        self.check(lambda c: c["boundary"][0].update(curve=["cos(t)", 3]),
                   "$.boundary[0].curve[1]")

    def test_unknown_boundary_key(self):
        self.check(lambda c: c["boundary"][0].update(reverse=True), "$.boundary[0]")

    def test_bad_quadrature(self):
        self.check(lambda c: c.update(quadrature={"order": 1}), "$.quadrature")
        self.check(lambda c: c.update(quadrature={"nodes": 4}), "$.quadrature")

    def test_bad_tolerance(self):
        self.check(lambda c: c.update(tolerances={"residual": 0.0}),
                   "$.tolerances.residual")

    def test_bad_L_grid(self):
        self.check(lambda c: c.update(L_grid=[100.0, -1.0]), "$.L_grid[1]")


class TestCrossValidation:
    def test_region_outside_domain(self):
        cfg = annulus_config()
        cfg["surface"]["domain"]["u"] = [-1.5, 1.5]
        with pytest.raises(SceneError, match="outside the surface domain"):
            sc.scene_from_config(cfg)

    def test_characteristic_region(self):
        cfg = annulus_config()
        cfg["region"] = {"type": "disk", "center": [0.0, 0.0], "radius": 1.0,
                         "euler_characteristic": 1}
        cfg["boundary"] = [{"curve": ["cos(t)", "sin(t)"], "t": [0.0, TWO_PI]}]
        with pytest.raises(SceneError, match="characteristic"):
            sc.scene_from_config(cfg)

    def test_degenerate_parametrization(self):
        cfg = annulus_config()
        cfg["surface"]["phi"] = ["u", "u", "0"]
        with pytest.raises(ImmersionError):
            sc.scene_from_config(cfg)

    def test_boundary_off_region_edge(self):
        cfg = annulus_config()
        cfg["boundary"][0]["curve"] = ["1.9*cos(t)", "1.9*sin(t)"]
        with pytest.raises(SceneError, match=r"\$.boundary\[0\]"):
            sc.scene_from_config(cfg)

    def test_orientation_note_accepted(self):
        cfg = annulus_config()
        cfg["boundary"][0]["orientation"] = "outer, counterclockwise"
        scene = sc.scene_from_config(cfg)
        assert len(scene.boundary) == 2

    def test_inline_frame_model(self):
        cfg = annulus_config()
        cfg["model"] = {"frame": {
            "e1": ["1", "0", "-y/2"],
            "e2": ["0", "1", "x/2"],
        }}
        scene = sc.scene_from_config(cfg)
        assert scene.region.chi == 0

    def test_inline_frame_must_satisfy_contact_condition(self):
        cfg = annulus_config()
        cfg["model"] = {"frame": {
            "e1": ["1", "0", "0"],
            "e2": ["0", "1", "0"],
        }}
        with pytest.raises(SceneError, match=r"\$\.model"):
            sc.scene_from_config(cfg)
