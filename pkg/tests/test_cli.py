import json
import socket
import threading
from pathlib import Path

import numpy as np
import pytest

from proxycam.cli import EXIT_GATE, EXIT_OK, EXIT_VALIDATION, main
from proxycam.config import RunConfig
from proxycam.errors import GateViolationError
from proxycam.runner import run_edge
from proxycam.sim.spec import save_scene_spec
from proxycam.transport.replay import read_packets, write_packets

from conftest import scene, solo_actor


@pytest.fixture
def scene_file(tmp_path):
    actor = solo_actor(
        [(0, 12, "stand")], height_px=70, trajectory=((0, 70.0, 100.0),)
    )
    spec = scene([actor], frame_count=12, width=160, height=120)
    path = tmp_path / "scene.json"
    save_scene_spec(spec, path)
    return path


@pytest.fixture
def empty_scene_file(tmp_path):
    spec = scene([], frame_count=6, width=160, height=120)
    path = tmp_path / "empty.json"
    save_scene_spec(spec, path)
    return path


class TestSimCommand:
    def test_writes_frames_and_ground_truth(self, tmp_path, scene_file):
        out = tmp_path / "sim"
        assert main(["sim", "--scene", str(scene_file), "--out", str(out)]) == EXIT_OK
        assert len(list((out / "frames").glob("*.png"))) == 12
        gt_lines = (out / "ground_truth.jsonl").read_text().splitlines()
        assert len(gt_lines) == 12
        summary = json.loads((out / "summary.json").read_text())
        for name in summary["files"]:
            assert (out / name).exists()

    def test_seeded_rerun_is_byte_identical(self, tmp_path, scene_file):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["sim", "--scene", str(scene_file), "--out", str(out_a)])
        main(["sim", "--scene", str(scene_file), "--out", str(out_b)])
        for png in sorted((out_a / "frames").glob("*.png")):
            assert png.read_bytes() == (out_b / "frames" / png.name).read_bytes()

    def test_empty_scene_frames_are_background_only(self, tmp_path, empty_scene_file):
        out = tmp_path / "sim"
        assert main(["sim", "--scene", str(empty_scene_file), "--out", str(out)]) == EXIT_OK
        from proxycam.pngio import decode_png

        frame = decode_png((out / "frames" / "frame_000000.png").read_bytes())
        background = decode_png((out / "background.png").read_bytes())
        assert np.array_equal(frame, background)


class TestEdgeCommand:
    def test_emits_one_packet_per_frame(self, tmp_path, scene_file):
        out = tmp_path / "edge"
        assert main(["edge", "--scene", str(scene_file), "--out", str(out)]) == EXIT_OK
        packets = list(read_packets(out / "packets.bin"))
        assert len(packets) == 12

    def test_rerun_is_byte_identical(self, tmp_path, scene_file):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["edge", "--scene", str(scene_file), "--out", str(out_a), "--seed", "5"])
        main(["edge", "--scene", str(scene_file), "--out", str(out_b), "--seed", "5"])
        assert (out_a / "packets.bin").read_bytes() == (out_b / "packets.bin").read_bytes()

    def test_gate_violation_stops_the_stream(self, tmp_path, scene_file):
        from proxycam.sim.spec import load_scene_spec

        spec = load_scene_spec(scene_file)
        config = RunConfig(scene=str(scene_file), out_dir=str(tmp_path / "o"))
        sent = []

        def violate_after_three(t):
            if t.key.frame_id == 3:
                t.flags = 0x80
            return t

        with pytest.raises(GateViolationError):
            run_edge(config, spec, sent.append, tuple_hook=violate_after_three)
        assert len(sent) == 3  # nothing emitted at or after the violation

    def test_gate_violation_exit_code(self, tmp_path, scene_file, monkeypatch):
        import proxycam.cli as cli_mod

        def hooked_run_edge(config, spec, sink, **kwargs):
            kwargs["tuple_hook"] = lambda t: (setattr(t, "flags", 1), t)[1]
            return run_edge(config, spec, sink, **kwargs)

        monkeypatch.setattr(cli_mod, "run_edge", hooked_run_edge)
        rc = main(["edge", "--scene", str(scene_file), "--out", str(tmp_path / "o")])
        assert rc == EXIT_GATE


class TestCloudCommand:
    def _edge_packets(self, tmp_path, scene_file) -> Path:
        out = tmp_path / "edge"
        main(["edge", "--scene", str(scene_file), "--out", str(out)])
        return out / "packets.bin"

    def test_replay_reports_every_packet(self, tmp_path, scene_file):
        packets_file = self._edge_packets(tmp_path, scene_file)
        out = tmp_path / "cloud"
        rc = main(["cloud", "--replay", str(packets_file), "--out", str(out)])
        assert rc == EXIT_OK
        reports = (out / "reports.jsonl").read_text().splitlines()
        assert len(reports) == 12
        assert len(list((out / "recon").glob("cam0_frame*.png"))) == 12

    def test_shuffled_replay_matches_in_order(self, tmp_path, scene_file):
        packets_file = self._edge_packets(tmp_path, scene_file)
        packets = list(read_packets(packets_file))
        rng = np.random.default_rng(3)
        shuffled = [packets[i] for i in rng.permutation(len(packets))]
        shuffled_file = tmp_path / "shuffled.bin"
        write_packets(shuffled_file, shuffled)

        out_a, out_b = tmp_path / "in_order", tmp_path / "shuffled"
        main(["cloud", "--replay", str(packets_file), "--out", str(out_a)])
        main(["cloud", "--replay", str(shuffled_file), "--out", str(out_b)])
        assert (out_a / "reports.jsonl").read_bytes() == (out_b / "reports.jsonl").read_bytes()
        for png in sorted((out_a / "recon").glob("*.png")):
            assert png.read_bytes() == (out_b / "recon" / png.name).read_bytes()

    def test_deleted_packet_yields_exactly_one_gap(self, tmp_path, scene_file):
        packets_file = self._edge_packets(tmp_path, scene_file)
        packets = list(read_packets(packets_file))
        del packets[2]  # drop frame 2
        gappy = tmp_path / "gappy.bin"
        write_packets(gappy, packets)
        out = tmp_path / "cloud"
        main(["cloud", "--replay", str(gappy), "--out", str(out)])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["gap_events"] == [2]

    def test_malformed_packet_skipped_and_counted(self, tmp_path, scene_file):
        packets_file = self._edge_packets(tmp_path, scene_file)
        packets = list(read_packets(packets_file))
        packets[4] = packets[4][:-2] + b"XX"
        broken = tmp_path / "broken.bin"
        write_packets(broken, packets)
        out = tmp_path / "cloud"
        rc = main(["cloud", "--replay", str(broken), "--out", str(out)])
        assert rc == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["malformed_packets"] == 1


class TestSocketTransport:
    def test_edge_to_cloud_over_loopback(self, tmp_path, scene_file):
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        address = f"127.0.0.1:{port}"
        cloud_out = tmp_path / "cloud"
        results = {}

        def run_cloud():
            results["cloud"] = main(["cloud", "--listen", address, "--out", str(cloud_out)])

        thread = threading.Thread(target=run_cloud, daemon=True)
        thread.start()
        import time

        time.sleep(0.3)
        try:
            rc_edge = main(
                ["edge", "--scene", str(scene_file), "--out", str(tmp_path / "e"),
                 "--connect", address]
            )
        finally:
            if thread.is_alive():
                # unblock accept() if the edge never connected
                try:
                    socket.create_connection(
                        ("127.0.0.1", port), timeout=1
                    ).close()
                except OSError:
                    pass
        thread.join(timeout=30)
        assert rc_edge == EXIT_OK
        assert results.get("cloud") == EXIT_OK
        assert len((cloud_out / "reports.jsonl").read_text().splitlines()) == 12


class TestE2ECommand:
    def test_stand_only_scene_scores_full_accuracy(self, tmp_path, scene_file):
        out = tmp_path / "e2e"
        rc = main(["e2e", "--scene", str(scene_file), "--out", str(out)])
        assert rc == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["metrics"]["accuracy"] == 1.0
        assert summary["render_mismatches"] == 0
        for name in summary["files"]:
            assert (out / name).exists(), name

    def test_empty_scene_accuracy_vacuously_one(self, tmp_path, empty_scene_file):
        out = tmp_path / "e2e"
        rc = main(["e2e", "--scene", str(empty_scene_file), "--out", str(out)])
        assert rc == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["metrics"]["accuracy"] == 1.0
        assert summary["metrics"]["frames_scored"] == 0


class TestConnectRetry:
    def test_dead_sink_retries_with_backoff_then_fails(self, tmp_path, scene_file):
        import time

        from proxycam.cli import EXIT_IO

        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            dead_port = probe.getsockname()[1]
        started = time.perf_counter()
        rc = main(
            ["edge", "--scene", str(scene_file), "--out", str(tmp_path / "o"),
             "--connect", f"127.0.0.1:{dead_port}"]
        )
        elapsed = time.perf_counter() - started
        assert rc == EXIT_IO
        assert elapsed >= 0.3  # 100 + 200 ms of backoff before giving up


class TestExitCodes:
    def test_missing_scene_is_validation_error(self, tmp_path):
        rc = main(["e2e", "--out", str(tmp_path / "x")])
        assert rc == EXIT_VALIDATION

    def test_unwritable_output_dir_is_io_error(self, tmp_path, scene_file):
        from proxycam.cli import EXIT_IO

        blocker = tmp_path / "blocker"
        blocker.write_text("a file where a directory must go")
        rc = main(["sim", "--scene", str(scene_file), "--out", str(blocker / "sub")])
        assert rc == EXIT_IO

    def test_nonexistent_scene_file(self, tmp_path):
        rc = main(["sim", "--scene", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
        assert rc == EXIT_VALIDATION

    def test_bad_config_key(self, tmp_path, scene_file):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"scene": str(scene_file), "tpyo": 1}))
        rc = main(["e2e", "--config", str(config), "--out", str(tmp_path / "x")])
        assert rc == EXIT_VALIDATION
