"""
Hierarquia de exceções do wpss
Cada falha tem um tipo próprio para que a CLI possa mapear códigos de saída
"""
from typing import Any, Dict, Optional


class WpssError(Exception):
    """Erro base de todo o sistema"""


class WordParseError(WpssError):
    """Palavra mal formada; guarda a posição (0-based) do primeiro erro"""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (posição {position})")
        self.position = position


class PresentationError(WpssError):
    """Apresentação inválida ou fora do formato esperado pela família"""


class AccessStructureError(WpssError):
    """Parâmetros (n, t) inválidos ou m acima do limite configurado"""


class ShareFormatError(WpssError):
    """Arquivo de share, esquema ou mensagem fora do formato"""


class InconsistentSharesError(WpssError):
    """Shares de esquemas diferentes ou participantes repetidos"""


class TamperError(InconsistentSharesError):
    """Mesmo índice global com palavras diferentes em shares distintos"""


class BelowThresholdError(WpssError):
    """Coalizão menor que o limiar t"""

    def __init__(self, participants: int, threshold: int, missing: int = 0):
        super().__init__(
            f"Apenas {participants} participantes distintos; o limiar é t={threshold} "
            f"({missing} relatores ausentes)"
        )
        self.participants = participants
        self.threshold = threshold
        self.missing = missing


class BudgetExhaustedError(WpssError):
    """Orçamento do motor esgotado: resultado indefinido, não uma decisão negativa"""

    def __init__(self, message: str, stats: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.stats = stats or {}


class MissingRuleError(WpssError):
    """Coleta precisou de uma regra ausente da apresentação parcial"""


class EncodingError(WpssError):
    """Dealer não conseguiu produzir uma palavra válida dentro das tentativas"""


class IntegrityError(WpssError):
    """Mensagem ou shares inconsistentes com o que o dealer produziu"""


class UndecidedWordError(IntegrityError):
    """Palavra de uma decodificação legítima ficou indefinida dentro do orçamento"""
