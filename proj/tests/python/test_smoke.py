import math

import pytest

import gssclu


def small_stream(n=300, seed=3):
    cfg = gssclu.SynthConfig()
    cfg.n_graphs = n
    cfg.seed = seed
    return gssclu.synth_generate(cfg)


def test_version():
    assert gssclu.__version__.count(".") == 2


def test_sketch_estimates_never_undercount():
    s = gssclu.CountMinSketch(gssclu.SketchConfig(rows=4, cols=64, seed=7))
    truth = {f"k{i}": float(i % 5 + 1) for i in range(200)}
    for key, v in truth.items():
        s.update(key, v)
    for key, v in truth.items():
        assert s.estimate(key) >= v
    assert s.self_inner_product() >= sum(v * v for v in truth.values())
    assert gssclu.CountMinSketch.deserialize(s.serialize()) == s


def test_sketch_merge_config_mismatch():
    a = gssclu.CountMinSketch(gssclu.SketchConfig(rows=2, cols=8, seed=1))
    b = gssclu.CountMinSketch(gssclu.SketchConfig(rows=2, cols=8, seed=2))
    with pytest.raises(gssclu.ConfigMismatch):
        a.merge(b)


def test_from_accuracy():
    c = gssclu.SketchConfig.from_accuracy(0.01, 0.05)
    assert c.rows == math.ceil(math.log(1 / 0.05))
    assert c.cols == math.ceil(math.e / 0.01)


def test_synth_is_deterministic():
    s1, g1 = small_stream()
    s2, g2 = small_stream()
    assert s1 == s2 and g1 == g2
    assert [t.name for t in s1.side_types] == ["topic", "noise"]
    assert all(g.label.startswith("c") for g in g1)


def test_engine_run_and_purity():
    schema, graphs = small_stream(600)
    cfg = gssclu.EngineConfig()
    cfg.k = 4
    cfg.gamma = 100
    eng = gssclu.SketchEngine(cfg, schema)
    events = eng.run(graphs)
    assert len(events) == 600
    assert eng.graph_count == 600
    assert eng.refresh_count == 6
    assert eng.n_clusters == 4
    assert len(eng.weights) == schema.d + 1
    assert all(w >= 0 for w in eng.weights)
    assert [e.sequence for e in events] == list(range(1, 601))
    assert all(e.action == gssclu.Action.initialized for e in events[:4])

    rep = gssclu.live_purity(events, [g.label for g in graphs])
    assert 0.25 <= rep.average_purity <= 1.0
    series = gssclu.purity_series(events, [g.label for g in graphs], 100)
    assert [p[0] for p in series] == [100, 200, 300, 400, 500, 600]


def test_exact_and_sketch_agree_on_a_generous_sketch():
    schema, graphs = small_stream(400)
    cfg = gssclu.EngineConfig()
    cfg.k = 4
    cfg.sketch = gssclu.SketchConfig(rows=4, cols=4096, seed=0)
    a = gssclu.SketchEngine(cfg, schema).run(graphs)
    b = gssclu.ExactEngine(cfg, schema).run(graphs)
    assert gssclu.assignment_agreement(a, b) >= 0.95


def test_checkpoint_resume_is_exact():
    schema, graphs = small_stream(500)
    cfg = gssclu.EngineConfig()
    cfg.k = 4
    cfg.gamma = 100
    full = gssclu.SketchEngine(cfg, schema)
    want = full.run(graphs)

    part = gssclu.SketchEngine(cfg, schema)
    head = part.run(graphs[:230])
    resumed = gssclu.SketchEngine.restore(part.checkpoint())
    tail = resumed.run(graphs[230:])
    assert head + tail == want
    assert resumed.checkpoint() == full.checkpoint()

    with pytest.raises(gssclu.FormatError):
        gssclu.SketchEngine.restore(b"junk")


def test_event_json_round_trip():
    schema, graphs = small_stream(20)
    cfg = gssclu.EngineConfig()
    cfg.k = 3
    for e in gssclu.SketchEngine(cfg, schema).run(graphs):
        assert gssclu.AssignmentEvent.from_json(e.to_json()) == e


def test_hand_built_graphs_are_preprocessed():
    schema = gssclu.StreamSchema([gssclu.SideType("kw")])
    cfg = gssclu.EngineConfig()
    cfg.k = 2
    eng = gssclu.ExactEngine(cfg, schema)
    g = gssclu.Graph("g1", [("b", "a", None), ("a", "b", 2.0)], [{"db": 3.0}])
    e = eng.process(g)
    assert e.action == gssclu.Action.initialized
    assert gssclu.preprocess(g, schema).edges == [("a", "b", 3.0)]

    too_wide = gssclu.Graph("g2", [("a", "b", None)], [{"x": 1.0}, {"y": 1.0}])
    with pytest.raises(gssclu.SchemaMismatch):
        eng.process(too_wide)


def test_invalid_config_raises_value_error():
    cfg = gssclu.EngineConfig()
    cfg.k = 1
    with pytest.raises(ValueError):
        gssclu.SketchEngine(cfg, gssclu.StreamSchema())


def test_read_stream_reports_skipped_lines(tmp_path):
    cfg = gssclu.SynthConfig()
    cfg.n_graphs = 10
    path = tmp_path / "s.ndjson"
    gssclu.synth_write(cfg, str(path))
    lines = path.read_text().splitlines()
    lines.insert(3, "{broken")
    path.write_text("\n".join(lines) + "\n")

    schema, graphs, skipped = gssclu.read_stream(str(path))
    assert len(graphs) == 10
    assert [line for line, _ in skipped] == [4]
    with pytest.raises(gssclu.ParseError):
        gssclu.read_stream(str(path), strict=True)

    eng, events, _ = gssclu.cluster_file(str(path), backend="exact")
    assert len(events) == 10 and eng.graph_count == 10
