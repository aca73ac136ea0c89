from .store import SessionStore, SessionRecord
from .artifacts import load_run_bundle, save_run_dir

__all__ = ["SessionStore", "SessionRecord", "save_run_dir", "load_run_bundle"]
