"""Extractive question-answering inference service.

Serves a pretrained span-extraction model behind a small HTTP protocol:
POST /v1/answer with {"question", "context"} returns {"answer", "start",
"end", "score"} where start/end are character offsets into the context
(or -1/-1 when no span can be aligned), and GET /v1/health returns "ok".
"""

from .app import ServiceConfig, create_app

__version__ = "0.1.0"
__all__ = ["ServiceConfig", "create_app"]
