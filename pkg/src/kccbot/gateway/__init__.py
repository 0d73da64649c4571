from kccbot.gateway.app import create_app
from kccbot.gateway.config import ServiceConfig, load_config
from kccbot.gateway.service import ChatService, InboundMessage, OutboundBundle

__all__ = [
    "ChatService",
    "InboundMessage",
    "OutboundBundle",
    "ServiceConfig",
    "create_app",
    "load_config",
]
