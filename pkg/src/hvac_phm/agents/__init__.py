from .parsing import UnparseableReply, parse_anomaly_reply, parse_fault_reply
from .pipeline import AgentConfig, Architecture, diagnose, run_agent
from .prompts import Prompt, build_anomaly_prompt, build_fault_prompt
from .providers import (
    CompletionProvider,
    CompletionRequest,
    FunctionProvider,
    HTTPProvider,
    OracleProvider,
    ProviderConfigError,
    TranscriptProvider,
    TransportError,
)
