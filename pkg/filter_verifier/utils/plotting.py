"""
Offscreen rendering of ideal vs fixed-point responses: magnitude (dB) on top,
phase (rad) below, spec band edges as dashed vertical lines.
"""
import logging
import os
from pathlib import Path
from typing import Literal

import numpy as np

logger = logging.getLogger(__name__)

color_map_shorthand = {
    'r': (255, 0, 0),
    'g': (0, 160, 0),
    'b': (0, 0, 255),
    'k': (0, 0, 0),
    'w': (255, 255, 255),
}

IDEAL_COLOR = 'b'
FIXED_COLOR = 'g'
EDGE_COLOR = 'k'


def _check_color(color):
    if isinstance(color, str):
        if color not in color_map_shorthand:
            raise ValueError(f"Unsupported color: {color}")
        return color_map_shorthand[color]
    if isinstance(color, tuple) and len(color) in (3, 4):
        return color
    raise ValueError(f"Unsupported color: {color!r}")


def _ensure_app():
    # No window is ever shown; default to the offscreen platform unless one is chosen
    os.environ.setdefault("QT_QPA_PLATFORM", "offscreen")
    import pyqtgraph as pg
    return pg.mkQApp("filter_verifier")


class ResponseFigure:
    def __init__(self, title: str = '', width: int = 900, height: int = 700):
        import pyqtgraph as pg

        self._app = _ensure_app()
        self._layout = pg.GraphicsLayoutWidget()
        self._layout.setBackground('w')
        self._layout.resize(width, height)
        self._width = width
        self._height = height

        self.magnitude = self._layout.addPlot(row=0, col=0, title=title)
        self.magnitude.setLabel('left', 'magnitude (dB)')
        self.magnitude.showGrid(x=True, y=True)
        self.magnitude.addLegend(offset=(10, 10))

        self.phase = self._layout.addPlot(row=1, col=0)
        self.phase.setLabel('left', 'phase (rad)')
        self.phase.setLabel('bottom', 'frequency (Hz)')
        self.phase.showGrid(x=True, y=True)
        self.phase.setXLink(self.magnitude)

    def plot_pair(self, freq_hz: np.ndarray, ideal: np.ndarray, fixed: np.ndarray,
                  which: Literal['magnitude', 'phase']) -> None:
        import pyqtgraph as pg

        target = self.magnitude if which == 'magnitude' else self.phase
        target.plot(freq_hz, ideal, pen=pg.mkPen(color=_check_color(IDEAL_COLOR), width=2), name='ideal')
        target.plot(freq_hz, fixed, pen=pg.mkPen(color=_check_color(FIXED_COLOR), width=2), name='fixed-point')

    def mark_edges(self, edges_hz: list[float]) -> None:
        import pyqtgraph as pg
        from PyQt6 import QtCore

        pen = pg.mkPen(color=_check_color(EDGE_COLOR), width=1, style=QtCore.Qt.PenStyle.DashLine)
        for f in edges_hz:
            for target in (self.magnitude, self.phase):
                target.addItem(pg.InfiniteLine(pos=f, angle=90, pen=pen))

    def set_magnitude_floor(self, floor_db: float) -> None:
        self.magnitude.setYRange(floor_db, 10.0)

    def save_fig(self, file_path: str | Path,
                 save_format: Literal['.png', '.svg'] | None = None) -> Path:
        from pyqtgraph.exporters import ImageExporter, SVGExporter

        p = Path(file_path)
        if save_format is None:
            save_format = p.suffix.lower()
        elif p.suffix.lower() != save_format.lower():
            p = p.with_name(p.name + save_format)
        p.parent.mkdir(parents=True, exist_ok=True)

        self._app.processEvents()
        scene = self._layout.scene()
        if save_format == '.png':
            exporter = ImageExporter(scene)
            exporter.params['width'] = self._width
            exporter.params['antialias'] = True
            exporter.export(str(p))
        elif save_format == '.svg':
            SVGExporter(scene).export(str(p))
        else:
            raise ValueError(f"Unsupported format: {save_format}")
        logger.info("saved response figure to %s", p)
        return p


def render_response(table: dict[str, np.ndarray], path: str | Path,
                    edges_hz: list[float] | None = None, title: str = '',
                    floor_db: float = -120.0) -> Path:
    """
    Render a response table (as built by io.export.response_table) to a PNG or SVG file.
    """
    fig = ResponseFigure(title)
    mag_ideal = np.maximum(table["mag_ideal_db"], floor_db)
    mag_fixed = np.maximum(table["mag_fixed_db"], floor_db)
    fig.plot_pair(table["freq_hz"], mag_ideal, mag_fixed, 'magnitude')
    fig.plot_pair(table["freq_hz"], table["phase_ideal_rad"], table["phase_fixed_rad"], 'phase')
    if edges_hz:
        fig.mark_edges(edges_hz)
    fig.set_magnitude_floor(floor_db)
    return fig.save_fig(path)
