import numpy as np
import pytest

from conftest import open_fixture
from textvid.errors import GeometryError, TextvidError, ValidationError
from textvid.evaluation import iou
from textvid.failure import FailureParams
from textvid.imgproc import save_image_u8
from textvid.pipeline import (
    FirstFrameBoxes,
    VideoSequence,
    assign_ids,
    polygon_to_box,
    retrack_from,
    run_pipeline,
)
from textvid.store import BoundingBox, Entry, Instance, validate
from textvid.synth import OCCLUSION_START
from textvid.tracker import TrackerParams


class TestAssignIds:
    def test_same_row_left_to_right(self):
        first = FirstFrameBoxes("manual", (BoundingBox(200, 10, 20, 10),
                                           BoundingBox(10, 10, 20, 10)))
        assigned = assign_ids(first)
        assert [(i, b.x) for i, b in assigned] == [("01", 10), ("02", 200)]

    def test_smaller_y_wins_over_smaller_x(self):
        first = FirstFrameBoxes("manual", (BoundingBox(10, 100, 20, 10),
                                           BoundingBox(300, 10, 20, 10)))
        assigned = assign_ids(first)
        assert assigned[0][1].x == 300

    def test_single_box(self):
        assigned = assign_ids(FirstFrameBoxes("manual", (BoundingBox(5, 5, 10, 10),)))
        assert assigned[0][0] == "01"

    def test_duplicate_boxes_rejected(self):
        with pytest.raises(ValidationError):
            FirstFrameBoxes("manual", (BoundingBox(5, 5, 10, 10),
                                       BoundingBox(5, 5, 10, 10)))

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            FirstFrameBoxes("manual", ())

    def test_deterministic(self):
        boxes = tuple(BoundingBox(x, y, 10, 10) for x, y in
                      [(50, 20), (10, 20), (30, 5), (90, 90)])
        a = assign_ids(FirstFrameBoxes("manual", boxes))
        b = assign_ids(FirstFrameBoxes("manual", tuple(reversed(boxes))))
        assert a == b


def test_polygon_to_box():
    box = polygon_to_box([(10, 5), (30, 8), (25, 40), (12, 35)])
    assert (box.x, box.y, box.w, box.h) == (10, 5, 20, 35)


class TestVideoSequence:
    def test_trim(self, translation_fixture):
        directory, _ = translation_fixture
        video = VideoSequence.open(directory, trim=(10, 30))
        assert video.n_frame == 21

    def test_bad_trim_rejected(self, translation_fixture):
        directory, _ = translation_fixture
        with pytest.raises(TextvidError):
            VideoSequence.open(directory, trim=(50, 500))

    def test_empty_dir_rejected(self, tmp_path):
        with pytest.raises(TextvidError):
            VideoSequence.open(str(tmp_path))

    def test_geometry_drift_aborts(self, tmp_path, rng):
        save_image_u8(str(tmp_path / "000001.png"),
                      rng.integers(0, 256, (20, 30), dtype=np.uint8))
        save_image_u8(str(tmp_path / "000002.png"),
                      rng.integers(0, 256, (22, 30), dtype=np.uint8))
        video = VideoSequence.open(str(tmp_path))
        with pytest.raises(TextvidError, match="geometry drift"):
            video.frame(2)


class TestRunPipeline:
    def test_two_frame_static_video(self, tmp_path, rng):
        coarse = rng.integers(0, 256, (30, 40))
        img = np.repeat(np.repeat(coarse, 4, 0), 4, 1).astype(np.uint8)
        for t in (1, 2):
            save_image_u8(str(tmp_path / f"{t:06d}.png"), img)
        video = VideoSequence.open(str(tmp_path))
        box = BoundingBox(40, 30, 48, 24)
        doc = run_pipeline(video, FirstFrameBoxes("manual", (box,)))
        second = doc.instances[0].entries[1].box
        assert second.x == pytest.approx(box.x, abs=1.0)
        assert second.y == pytest.approx(box.y, abs=1.0)

    def test_translation_fixture_mean_iou(self, translation_fixture):
        video, first, gt = open_fixture(translation_fixture)
        doc = run_pipeline(video, first, TrackerParams())
        ious = [iou(e.box, g.box) for e, g in
                zip(doc.instances[0].entries, gt.instances[0].entries)]
        assert np.mean(ious) >= 0.8
        assert validate(doc) == []

    def test_occlusion_stops_within_ten_frames(self, occlusion_fixture):
        video, first, _ = open_fixture(occlusion_fixture)
        doc = run_pipeline(video, first, TrackerParams(), FailureParams())
        inst = doc.instances[0]
        assert inst.stopped_at is not None
        assert OCCLUSION_START <= inst.stopped_at <= OCCLUSION_START + 10
        assert inst.entries[-1].frame <= inst.stopped_at

    def test_occlusion_without_failure_detection_continues(self, occlusion_fixture):
        video, first, _ = open_fixture(occlusion_fixture)
        doc = run_pipeline(video, first, TrackerParams(), None)
        inst = doc.instances[0]
        assert inst.stopped_at is None
        assert inst.entries[-1].frame == video.n_frame

    def test_box_outside_frame_rejected(self, translation_fixture):
        video, _, _ = open_fixture(translation_fixture)
        first = FirstFrameBoxes("manual", (BoundingBox(350, 100, 64, 24),))
        with pytest.raises(GeometryError):
            run_pipeline(video, first)

    def test_entries_contiguous_and_unique(self, occlusion_fixture):
        video, first, _ = open_fixture(occlusion_fixture)
        doc = run_pipeline(video, first, TrackerParams(), FailureParams())
        for inst in doc.instances:
            frames = [e.frame for e in inst.entries]
            assert frames == list(range(1, len(frames) + 1))

    def test_instance_order_independence(self, translation_fixture, rng):
        video, _, gt = translation_fixture[0], None, translation_fixture[1]
        video = VideoSequence.open(translation_fixture[0], trim=(1, 10))
        b1 = gt.instances[0].entries[0].box
        b2 = BoundingBox(200, 30, 40, 20)
        doc_a = run_pipeline(video, FirstFrameBoxes("manual", (b1, b2)))
        doc_b = run_pipeline(video, FirstFrameBoxes("manual", (b2, b1)))
        assert doc_a.instances == doc_b.instances

    def test_determinism(self, translation_fixture):
        video, first, _ = open_fixture(translation_fixture)
        video = VideoSequence.open(translation_fixture[0], trim=(1, 15))
        a = run_pipeline(video, first, TrackerParams())
        b = run_pipeline(video, first, TrackerParams())
        assert a == b


class TestRetrackFrom:
    def test_correction_at_final_frame(self, translation_fixture):
        video, first, _ = open_fixture(translation_fixture)
        video = VideoSequence.open(translation_fixture[0], trim=(1, 20))
        doc = run_pipeline(video, first)
        corrected = BoundingBox(100, 100, 64, 24)
        revised = retrack_from(doc, video, "01", 20, corrected)
        assert revised.instances[0].entries[19].box == corrected
        assert revised.instances[0].entries[19].source == "corrected"
        assert revised.instances[0].entries[:19] == doc.instances[0].entries[:19]

    def test_correction_at_frame_one_is_fresh_run(self, translation_fixture):
        video, first, gt = open_fixture(translation_fixture)
        video = VideoSequence.open(translation_fixture[0], trim=(1, 20))
        doc = run_pipeline(video, first)
        revised = retrack_from(doc, video, "01", 1, first.boxes[0])
        fresh = run_pipeline(video, first)
        assert [e.box for e in revised.instances[0].entries] == \
               [e.box for e in fresh.instances[0].entries]

    def test_midvideo_correction_improves_drifting_track(self, translation_fixture):
        video, first, gt = open_fixture(translation_fixture)
        doc = run_pipeline(video, first)
        # fabricate drift: shift every tracked box after frame 50 by 15 px
        inst = doc.instances[0]
        drifted_entries = tuple(
            e if e.frame < 50 else Entry(
                frame=e.frame,
                box=BoundingBox(e.box.x + 15, e.box.y + 15, e.box.w, e.box.h),
                source=e.source, confidence=e.confidence)
            for e in inst.entries
        )
        drifted = doc.__class__(
            video=doc.video, n_frame=doc.n_frame, frame_width=doc.frame_width,
            frame_height=doc.frame_height, frame_channels=doc.frame_channels,
            instances=(Instance(id="01", entries=drifted_entries),),
            tracker_params=doc.tracker_params,
        )
        gt_boxes = {e.frame: e.box for e in gt.instances[0].entries}

        def tail_miou(d):
            vals = [iou(e.box, gt_boxes[e.frame])
                    for e in d.instances[0].entries if e.frame >= 50]
            return np.mean(vals)

        corrected = retrack_from(drifted, video, "01", 50, gt_boxes[50])
        assert tail_miou(corrected) > tail_miou(drifted)

    def test_unknown_instance_rejected(self, translation_fixture):
        video, first, _ = open_fixture(translation_fixture)
        video = VideoSequence.open(translation_fixture[0], trim=(1, 5))
        doc = run_pipeline(video, first)
        with pytest.raises(KeyError):
            retrack_from(doc, video, "77", 3, BoundingBox(10, 10, 20, 10))

    def test_other_instances_untouched(self, translation_fixture):
        video, _, gt = open_fixture(translation_fixture)
        video = VideoSequence.open(translation_fixture[0], trim=(1, 10))
        b1 = gt.instances[0].entries[0].box
        b2 = BoundingBox(200, 30, 40, 20)
        doc = run_pipeline(video, FirstFrameBoxes("manual", (b1, b2)))
        revised = retrack_from(doc, video, "02", 5, BoundingBox(210, 35, 40, 20))
        assert revised.instance("01") == doc.instance("01")
        assert revised.instance("02") != doc.instance("02")
