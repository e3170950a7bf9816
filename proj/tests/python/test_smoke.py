"""End-to-end smoke tests for the Python bindings."""

import pytest

import taskseg


def test_preset_compiles_and_segments():
    plan = taskseg.preset_star(4)
    rec = taskseg.compile_plan(plan)
    assert rec.frame_rate == 30.0
    assert rec.frame_count == len(rec)
    assert [n.name for n in rec.nodes][:2] == ["hub", "spoke_1"]

    result = taskseg.segment(rec)
    assert len(result.fine) == 4
    assert {bp.rule for bp in result.fine} == {taskseg.Rule.origin_connection}
    assert len(result.coarse) == 1
    assert result.coarse[0].rule == taskseg.Rule.coarse_merge
    for bp in result.fine:
        assert bp.refined_frame - bp.raw_frame == 15  # 0.5 s at 30 fps


def test_ocg_weights():
    rec = taskseg.compile_plan(taskseg.preset_star(3))
    ocg = taskseg.build_ocg(rec)
    assert ocg.origin == 0
    assert ocg.weight[0] == 1.0
    assert ocg.weight[1] == 0.5
    assert ocg.distance[2] == 1
    assert ocg.centrality[0] == 1.0


def test_oracle_matches_segmenter():
    plan = taskseg.preset_distributed(4, 3)
    rec = taskseg.compile_plan(plan)
    result = taskseg.segment(rec)
    oracle = taskseg.oracle_breakpoints(plan, result.ocg)
    assert [bp.raw_frame for bp in result.fine] == [
        bp.frame for bp in oracle.fine
    ]
    assert [bp.refined_frame for bp in result.fine] == [
        bp.refined_frame for bp in oracle.fine
    ]
    assert len(oracle.fine) == 12
    assert len(oracle.coarse) == 3


def test_segment_options():
    plan = taskseg.preset_distributed(2, 2)
    rec = taskseg.compile_plan(plan)

    opts = taskseg.SegmentOptions()
    opts.refine_breakpoints = False
    raw = taskseg.segment(rec, opts)
    assert all(bp.refined_frame == bp.raw_frame for bp in raw.fine)

    opts = taskseg.SegmentOptions()
    grouping = taskseg.SegmenterOptions()
    grouping.category_groups = {n.name: "all" for n in rec.nodes}
    opts.grouping = grouping
    merged = taskseg.segment(rec, opts)
    assert len(merged.coarse) == 1


def test_recording_round_trip(tmp_path):
    rec = taskseg.compile_plan(taskseg.random_plan(7))
    path = tmp_path / "sample.rec"
    taskseg.write_recording_file(str(path), rec)
    assert taskseg.read_recording_file(str(path)) == rec
    assert taskseg.loads_recording(taskseg.dumps_recording(rec)) == rec


def test_plan_round_trip(tmp_path):
    plan = taskseg.random_plan(11)
    path = tmp_path / "sample.plan"
    taskseg.write_plan_file(str(path), plan)
    assert taskseg.read_plan_file(str(path)) == plan


def test_evaluation_chain():
    rows = [
        taskseg.AnnotationRow(f"p{k}", 10.2 + 0.01 * k, "evt") for k in range(13)
    ]
    rows = taskseg.bin_annotations(rows, 1.0)
    gt = taskseg.cluster_ground_truth(rows)
    assert len(gt.breakpoints) == 1
    assert gt.breakpoints[0].time == 10.5
    assert gt.breakpoints[0].support == 13

    matches = taskseg.match_breakpoints([10.0], gt, 3.0)
    report = taskseg.compute_metrics(matches, 1, 1)
    assert report.precision == 1.0
    assert report.recall == 1.0
    assert report.f1 == 1.0
    assert report.mae == pytest.approx(0.5)


def test_errors_carry_codes():
    plan = taskseg.preset_star(3)
    plan.duration = -1.0
    with pytest.raises(taskseg.TasksegError) as exc_info:
        taskseg.compile_plan(plan)
    assert exc_info.value.code == "PlanError"

    with pytest.raises(taskseg.TasksegError) as exc_info:
        taskseg.read_recording_file("/nonexistent/input.rec")
    assert exc_info.value.code == "IoError"


def test_segment_tree_partitions():
    rec = taskseg.compile_plan(taskseg.preset_distributed(3, 3))
    tree = taskseg.segment(rec).tree
    assert tree.duration == pytest.approx(rec.duration)
    assert tree.segments[0].span.start == 0.0
    assert tree.segments[-1].span.end == pytest.approx(rec.duration)
    fine = tree.fine_segments()
    for earlier, later in zip(fine, fine[1:]):
        assert earlier.end == later.start
