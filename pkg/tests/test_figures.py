from tmlab.density import Event, EventKind, estimate_density
from tmlab.figures import density_figure, walk_figure
from tmlab.machine import MachineModel
from tmlab.walks import WalkSpec, falloff_cdf, falloff_mc

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_density_figure_writes_png(tmp_path):
    model = MachineModel.one_way(2)
    event = Event(EventKind.HALTS_OR_FALLS_BEFORE_REPEAT)
    rows = [
        estimate_density(event, n, 2, model, 100, 3000 + n, engine="pure")
        for n in (1, 10, 100)
    ]
    out = tmp_path / "density.png"
    density_figure(rows, out)
    assert out.read_bytes()[:8] == PNG_MAGIC


def test_walk_figure_writes_png(tmp_path):
    points = [
        (k, falloff_cdf(k), falloff_mc(
            WalkSpec(1, k, trials=50, master_seed=k), engine="pure"
        ))
        for k in (1, 3, 5)
    ]
    points.append((7, falloff_cdf(7), None))
    out = tmp_path / "walk.png"
    walk_figure(points, out)
    assert out.read_bytes()[:8] == PNG_MAGIC
