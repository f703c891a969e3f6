import json

import numpy as np
import pytest

from app.config import EngineConfig, load_engine_config
from app.scene.loader import dump_scene, load_scene, save_scene, scene_from_dict
from app.scene.model import FrameNote, RelationTriple, SurfaceKind, make_object_id
from app.scene.writer import read_triples, render_triples, write_triples
from app.utils.errors import ParseError, TripleIoError, UnitError, ValidationError
from tests.conftest import make_box


def minimal(**object_fields):
    obj = {"id": "box1", "box": {"center": [0, 0, 0.5], "half_extents": [0.5, 0.5, 0.5], "yaw": 0.0}}
    obj.update(object_fields)
    return {"schema_version": 1, "robot_pose": {"x": 0, "y": 0, "heading": 0}, "objects": [obj]}


def write_json(tmp_path, payload, name="scene.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


class TestLoadScene:
    def test_minimal_scene(self, engine_cfg):
        scene = scene_from_dict(minimal(), cfg=engine_cfg)
        assert len(scene) == 1
        assert scene.objects[0].box.volume == pytest.approx(1.0)

    def test_extinguisher_fixture(self, extinguisher_scene):
        assert len(extinguisher_scene) == 5
        assert {o.id for o in extinguisher_scene.surfaces} == {"wall", "floor"}
        wall = extinguisher_scene.get("wall")
        assert wall.surface_kind is SurfaceKind.WALL
        assert wall.box.hx == pytest.approx(0.01)
        assert wall.box.center.x == pytest.approx(3.01)
        assert extinguisher_scene.get("radiator").label == "radiator"

    def test_point_cloud_of_box_corners_is_refitted_exactly(self, engine_cfg):
        declared = make_box((1.0, 2.0, 0.3), (0.4, 0.2, 0.3), 0.25)
        data = minimal(points=declared.corners().tolist())
        del data["objects"][0]["box"]
        fitted = scene_from_dict(data, cfg=engine_cfg).objects[0].box
        assert np.allclose(np.sort(fitted.corners(), axis=0), np.sort(declared.corners(), axis=0), atol=1e-6)

    def test_duplicate_ids(self, engine_cfg):
        data = minimal()
        data["objects"].append(dict(data["objects"][0]))
        with pytest.raises(ValidationError) as err:
            scene_from_dict(data, cfg=engine_cfg)
        assert err.value.location == "objects[1].id"

    def test_two_geometries_rejected(self, engine_cfg):
        with pytest.raises(ValidationError):
            scene_from_dict(minimal(points=[[0, 0, 0]]), cfg=engine_cfg)

    def test_too_many_labels(self, engine_cfg):
        labels = [{"label": f"l{i}", "confidence": 0.9 - i * 0.1} for i in range(6)]
        with pytest.raises(ValidationError):
            scene_from_dict(minimal(labels=labels), cfg=engine_cfg)

    def test_labels_must_descend(self, engine_cfg):
        labels = [{"label": "a", "confidence": 0.2}, {"label": "b", "confidence": 0.7}]
        with pytest.raises(ValidationError):
            scene_from_dict(minimal(labels=labels), cfg=engine_cfg)

    def test_unknown_fields_strict_and_lenient(self, engine_cfg):
        data = minimal(colour="red")
        with pytest.raises(ValidationError) as err:
            scene_from_dict(data, cfg=engine_cfg)
        assert "objects[0].colour" in str(err.value)
        assert len(scene_from_dict(data, strict=False, cfg=engine_cfg)) == 1

    @pytest.mark.parametrize("where, value, location", [
        (("robot_pose", "x"), "0", "robot_pose.x"),
        (("robot_pose", "heading"), "0", "robot_pose.heading"),
        (("objects", 0, "labels"), [{"label": "box", "confidence": "0.9"}], "objects[0].labels[0].confidence"),
        (("objects", 0, "box", "center"), ["1.0", 0, 0], "objects[0].box.center[0]"),
        (("objects", 0, "box", "yaw"), True, "objects[0].box.yaw"),
    ])
    def test_strict_load_refuses_coercion(self, engine_cfg, where, value, location):
        data = minimal()
        target = data
        for key in where[:-1]:
            target = target[key]
        target[where[-1]] = value
        with pytest.raises(ValidationError) as err:
            scene_from_dict(data, cfg=engine_cfg)
        assert err.value.location == location
        assert len(scene_from_dict(data, strict=False, cfg=engine_cfg)) == 1

    def test_strict_load_accepts_integers_for_lengths(self, engine_cfg):
        data = minimal()
        data["objects"][0]["box"] = {"center": [1, 0, 1], "half_extents": [1, 1, 1], "yaw": 0}
        box = scene_from_dict(data, cfg=engine_cfg).objects[0].box
        assert box.center.x == 1.0 and box.volume == pytest.approx(8.0)

    def test_unsupported_version(self, engine_cfg):
        data = minimal()
        data["schema_version"] = 7
        with pytest.raises(ValidationError):
            scene_from_dict(data, cfg=engine_cfg)

    def test_non_finite_values(self, engine_cfg):
        data = minimal()
        data["objects"][0]["box"]["yaw"] = float("nan")
        with pytest.raises(UnitError):
            scene_from_dict(data, cfg=engine_cfg)

    def test_misdeclared_surface(self, engine_cfg):
        data = minimal(surface={"kind": "floor", "polygon": [[3, -2, 0], [3, 2, 0], [3, 2, 2], [3, -2, 2]]})
        del data["objects"][0]["box"]
        with pytest.raises(ValidationError):
            scene_from_dict(data, cfg=engine_cfg)

    def test_malformed_json_is_line_anchored(self, tmp_path, engine_cfg):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "schema_version": 1,\n  "objects": [\n', encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_scene(str(path), cfg=engine_cfg)
        assert err.value.location.startswith(f"{path}:")

    def test_missing_file(self, tmp_path, engine_cfg):
        with pytest.raises(ParseError):
            load_scene(str(tmp_path / "nope.json"), cfg=engine_cfg)

    def test_validation_errors_name_the_file(self, tmp_path, engine_cfg):
        data = minimal()
        data["objects"].append(dict(data["objects"][0]))
        path = write_json(tmp_path, data)
        with pytest.raises(ValidationError) as err:
            load_scene(path, cfg=engine_cfg)
        assert err.value.location.startswith(path)

    def test_save_and_reload_keeps_boxes(self, tmp_path, extinguisher_scene, engine_cfg):
        path = str(tmp_path / "again.json")
        save_scene(extinguisher_scene, path)
        again = load_scene(path, cfg=engine_cfg)
        for original, reloaded in zip(extinguisher_scene.objects, again.objects):
            assert original.id == reloaded.id
            assert original.surface_kind is reloaded.surface_kind
            assert np.allclose(original.box.corners(), reloaded.box.corners(), atol=1e-9)
        assert dump_scene(again) == dump_scene(extinguisher_scene)


class TestTriples:
    triples = [
        RelationTriple("fire_extinguisher2", "LeftOf", "radiator", FrameNote.CONTEXTUALISED, ("Int(hs:Y+)=true",)),
        RelationTriple("fire_extinguisher1", "AffixedOn", "wall", FrameNote.CONTEXTUALISED),
        RelationTriple("fire_extinguisher2", "Touches", "floor", FrameNote.GLOBAL, ("Touches=true",)),
    ]

    def test_empty_list_gives_empty_output(self, tmp_path):
        path = tmp_path / "empty.txt"
        write_triples([], str(path))
        assert path.read_text(encoding="utf-8") == ""
        assert render_triples([], "table") == ""

    def test_lines_round_trip(self, tmp_path):
        path = str(tmp_path / "triples.txt")
        write_triples(self.triples, path)
        parsed = read_triples(path)
        assert parsed == sorted(self.triples, key=lambda t: t.sort_key())

    def test_output_is_sorted_and_stable(self):
        first = render_triples(self.triples)
        assert first == render_triples(list(reversed(self.triples)))
        references = [json.loads(line)["reference"] for line in first.splitlines()]
        assert references == ["floor", "radiator", "wall"]

    def test_table_format(self):
        table = render_triples(self.triples, "table").splitlines()
        assert table[0].split() == ["FIGURE", "RELATION", "REFERENCE", "FRAME"]
        assert table[2].split() == ["fire_extinguisher2", "LeftOf", "radiator", "contextualised"]

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render_triples(self.triples, "xml")

    def test_unwritable_destination(self, tmp_path):
        with pytest.raises(TripleIoError):
            write_triples(self.triples, str(tmp_path / "missing" / "dir" / "out.txt"))

    def test_bad_record_is_line_anchored(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text('{"figure": "a"}\n', encoding="utf-8")
        with pytest.raises(ParseError) as err:
            read_triples(str(path))
        assert err.value.location.endswith(":1")


class TestEngineConfig:
    def test_file_then_overrides(self, tmp_path):
        path = write_json(tmp_path, {"closeness_T": 0.8, "touch_eps": 0.02}, "cfg.json")
        cfg = load_engine_config(path, {"closeness_T": 0.6, "halfspace_scale_s": None})
        assert cfg.closeness_T == 0.6
        assert cfg.touch_eps == 0.02

    def test_prune_radius_defaults_to_closeness(self):
        assert EngineConfig(closeness_T=0.7, prune_T=None).pruning_radius == 0.7
        assert EngineConfig(closeness_T=0.7, prune_T=1.5).pruning_radius == 1.5

    def test_invalid_values(self, tmp_path):
        with pytest.raises(ValidationError):
            load_engine_config(None, {"closeness_T": -1.0})
        with pytest.raises(ValidationError):
            load_engine_config(None, {"closeness_T": 0.001, "touch_eps": 0.01})
        with pytest.raises(ValidationError):
            load_engine_config(write_json(tmp_path, {"bogus": 1}, "cfg.json"))

    def test_malformed_config_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ParseError):
            load_engine_config(str(path))

    def test_relation_config_carries_thresholds(self, engine_cfg):
        rc = engine_cfg.relation_config()
        assert (rc.closeness_T, rc.touch_eps, rc.adjacency_delta) == (0.5, 0.01, 0.02)


def test_object_ids_concatenate_timestamp_and_index():
    assert make_object_id("20240131T101500", 3) == "20240131T1015003"
