"""chois: language- and waypoint-conditioned human-object interaction synthesis.

A desk-scale diffusion pipeline: object geometry encoding, a transformer
denoiser trained to predict clean motion, contact-aware guidance at sampling
time, evaluation metrics, and a planner-driven long-horizon generator.
"""

__version__ = "0.1.0"
