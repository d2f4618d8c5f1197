"""FastAPI service and teleoperation sessions."""

from .app import create_app
from .session import TeleopService, replay_session

__all__ = ["create_app", "TeleopService", "replay_session"]
