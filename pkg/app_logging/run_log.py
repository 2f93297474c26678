import json
import logging
from typing import Any, Dict, Optional

logger = logging.getLogger("peel.run")

FAILED_STATUSES = {"failed", "error"}


def log_image_event(
    image_id: str,
    stage: str,
    status: str,
    detail: Optional[str] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> None:
    """
    Log one per-image pipeline event (hide / attack / reveal / metrics).
    Failures go to ERROR, everything else to INFO. Never raises.
    """
    try:
        payload = json.dumps(extra, ensure_ascii=False, sort_keys=True, default=str) if extra else ""
        message = f"📝 [{image_id}] {stage}: {status}"
        if detail:
            message += f" - {detail}"
        if payload:
            message += f" {payload}"
        if status.lower() in FAILED_STATUSES:
            logger.error(message)
        else:
            logger.info(message)
    except Exception as e:
        # Don't fail the run if logging fails
        print("⚠️ log_image_event failed:", repr(e))
