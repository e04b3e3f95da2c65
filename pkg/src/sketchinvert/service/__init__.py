from .app import ServiceConfig, ModelSnapshot, create_app, load_snapshot

__all__ = ["ServiceConfig", "ModelSnapshot", "create_app", "load_snapshot"]
