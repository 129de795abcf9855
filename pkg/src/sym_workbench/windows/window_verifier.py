from typing import Optional

from sym_workbench.windows.base_verifier import WindowReport
from sym_workbench.windows.point_verifier import PointWindowVerifier
from sym_workbench.windows.series_verifier import SeriesWindowVerifier
from sym_workbench.windows.window import Frame, Window


class WindowVerifier:
    """
    Factory class for window verifiers.

    Supported frames:
    - Frame.POINT: windows over W(k)
    - Frame.SERIES: windows over W(k)[[t]] / t^T
    """

    def __init__(self, frame: "str | Frame" = "point", nilpotence_bound: Optional[int] = None) -> None:
        """
        Args:
            frame: "point" or "series"
            nilpotence_bound: number of psi# iterations tried for (W.4); defaults depend on the frame
        """
        if isinstance(frame, str):
            self.frame = Frame(frame.lower())
        else:
            self.frame = frame
        self.nilpotence_bound = nilpotence_bound

    def verify(self, window: Window) -> WindowReport:
        if self.frame == Frame.POINT:
            verifier = PointWindowVerifier(self.nilpotence_bound)
        elif self.frame == Frame.SERIES:
            verifier = SeriesWindowVerifier(self.nilpotence_bound)
        else:
            raise ValueError(f"Unsupported frame: {self.frame}")
        return verifier.verify(window)


def verify_window(window: Window, nilpotence_bound: Optional[int] = None) -> WindowReport:
    """
    Check (W.1)-(W.4) and psi# phi# = p for a window over its own frame.
    """
    return WindowVerifier(window.frame, nilpotence_bound).verify(window)


__all__ = ["PointWindowVerifier", "SeriesWindowVerifier", "WindowVerifier", "verify_window"]
