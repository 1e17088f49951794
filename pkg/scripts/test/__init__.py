"""
수치/CLI 테스트 모듈

사용법:
    # 전체 테스트 실행
    python -m scripts.test.runner

    # 특정 모듈만 실행
    python -m scripts.test.runner -m test_lap

    # 특정 테스트 함수만 실행
    python -m scripts.test.runner -m test_lap -t test_leave_one_out_example
"""

from scripts.test.base import BaseTester

__all__ = ['BaseTester']
