"""Tool package exports."""

from .compare import CompareTool
from .demo import DemoTool
from .extend import ExtendTool
from .membership import MembershipTool
from .parametrize import ParametrizeTool
from .verify import VerifyTool

__all__ = [
    "CompareTool",
    "DemoTool",
    "ExtendTool",
    "MembershipTool",
    "ParametrizeTool",
    "VerifyTool",
]
