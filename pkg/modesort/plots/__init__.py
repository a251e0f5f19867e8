from .visualize import draw_eta_heatmap, draw_modes, draw_spsa_trace, draw_visibility_scan

__all__ = ["draw_eta_heatmap", "draw_visibility_scan", "draw_spsa_trace", "draw_modes"]
