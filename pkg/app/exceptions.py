import json
import sys
import traceback
from os import getenv
from typing import Optional


# CLI 종료 코드 (버전 간 고정)
EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4


class AppException(Exception):
    """애플리케이션 커스텀 예외 베이스 클래스"""
    def __init__(self, message: str, detail: Optional[str] = None):
        self.message = message
        self.detail = detail or message
        super().__init__(self.message)

    @property
    def exit_code(self) -> int:
        """CLI 종료 코드 반환"""
        return EXIT_INTERNAL


class InputError(AppException):
    """입력 검증 실패 (비유한 값, 차원 불일치 등)"""
    @property
    def exit_code(self) -> int:
        return EXIT_INPUT


class ShapeError(InputError):
    """비용 행렬의 행 수가 열 수보다 많음"""
    pass


class IndexOutOfRangeError(InputError):
    """열/영역 인덱스가 범위를 벗어남"""
    pass


class DataFormatError(AppException):
    """CSV/JSON 파싱 또는 파일 IO 실패"""
    def __init__(self, message: str, detail: Optional[str] = None, line: Optional[int] = None):
        self.line = line
        if line is not None:
            detail = f"line {line}: {detail or message}"
        super().__init__(message, detail)

    @property
    def exit_code(self) -> int:
        return EXIT_INPUT


class ConfigurationError(AppException):
    """설정 오류 (도달 불가능한 alpha, 알 수 없는 시나리오, 모드 불일치)"""
    @property
    def exit_code(self) -> int:
        return EXIT_CONFIG


class ConvergenceError(AppException):
    """쌍대 상승이 반복 한도 안에 허용 오차에 도달하지 못함"""
    def __init__(self, message: str, detail: Optional[str] = None, deviation: Optional[float] = None):
        self.deviation = deviation
        super().__init__(message, detail)

    @property
    def exit_code(self) -> int:
        return EXIT_NUMERICAL


class SamplingError(AppException):
    """기각 샘플링이 제안 한도를 초과함"""
    @property
    def exit_code(self) -> int:
        return EXIT_NUMERICAL


class InternalError(AppException):
    """예상치 못한 내부 에러"""
    pass


def is_development() -> bool:
    """개발 환경인지 확인"""
    env = getenv("ENVIRONMENT", "development").lower()
    return env in ("development", "dev", "local")


def is_korean() -> bool:
    """한국어 환경인지 확인"""
    language = getenv("LANGUAGE", "").upper()
    return language == "KR"


def translate_message(message: str) -> str:
    """에러 메시지를 한국어로 번역"""
    if not is_korean():
        return message

    translations = {
        "Invalid input": "잘못된 입력",
        "Non-finite entry": "유한하지 않은 값",
        "Dimension mismatch": "차원 불일치",
        "Invalid cost matrix shape": "잘못된 비용 행렬 크기",
        "Column index out of range": "열 인덱스가 범위를 벗어났습니다",
        "Region index out of range": "영역 인덱스가 범위를 벗어났습니다",
        "Malformed CSV": "잘못된 CSV 형식",
        "Malformed artifact": "잘못된 아티팩트 형식",
        "File not found": "파일을 찾을 수 없습니다",
        "Alpha unreachable for grid": "그리드에서 도달할 수 없는 alpha",
        "Unknown scenario": "알 수 없는 시나리오",
        "Mode mismatch": "모드 불일치",
        "Invalid grid plan": "잘못된 그리드 계획",
        "Dual ascent did not converge": "쌍대 상승이 수렴하지 않았습니다",
        "Rejection sampling cap exceeded": "기각 샘플링 한도 초과",
        "Empty Laguerre cell": "비어 있는 라게르 셀",
        "Internal error": "내부 오류",
        "An unexpected error occurred": "예상치 못한 오류가 발생했습니다",
    }

    if message in translations:
        return translations[message]

    # 부분 매칭으로 번역 (긴 패턴부터 매칭)
    sorted_translations = sorted(translations.items(), key=lambda x: len(x[0]), reverse=True)
    for en_msg, kr_msg in sorted_translations:
        if en_msg in message:
            return message.replace(en_msg, kr_msg)

    return message


def app_exception_handler(exc: AppException) -> int:
    """커스텀 예외를 JSON 에러 객체로 stderr에 출력하고 종료 코드 반환"""
    response_data = {
        "error": exc.__class__.__name__,
        "message": translate_message(exc.message),
        "detail": exc.detail,
    }

    # 개발 환경에서만 스택 트레이스 포함
    if is_development():
        response_data["traceback"] = traceback.format_exc()

    print(json.dumps(response_data, ensure_ascii=False), file=sys.stderr)
    return exc.exit_code


def general_exception_handler(exc: Exception) -> int:
    """일반 예외 핸들러 (예상치 못한 에러)"""
    app_exc = InternalError(
        message="Internal error",
        detail=str(exc) if is_development() else "An unexpected error occurred",
    )
    return app_exception_handler(app_exc)
