"""modnorm: community norm violation detection, explanation, and triage."""

__version__ = "0.1.0"
