import logging
import signal
import threading
from typing import Any, Callable, Dict, List, Optional

import numpy as np

logger = logging.getLogger(__name__)

Replicate = Callable[[int, Dict[str, np.random.Generator]], Any]


class ReplicationWorker:
    """교환 가능 복제를 배치 단위로 실행

    복제마다 이름 붙은 SeedSequence 에서 독립 Generator 를 받으므로
    결과는 배치 크기나 실행 순서와 무관하다.
    """

    def __init__(
        self,
        replicate: Replicate,
        streams: Dict[str, np.random.SeedSequence],
        batch_size: int = 500,
        handle_signals: bool = False,
    ):
        self.replicate = replicate
        self.streams = streams
        self.batch_size = max(1, int(batch_size))
        self.handle_signals = handle_signals
        self.running = True
        self.completed = 0

    def process_batch(self, start: int, children: Dict[str, List[np.random.SeedSequence]]) -> List[Any]:
        """한 배치 처리"""
        stop = min(start + self.batch_size, len(next(iter(children.values()))))
        results = []
        for index in range(start, stop):
            rngs = {name: np.random.default_rng(seqs[index]) for name, seqs in children.items()}
            results.append(self.replicate(index, rngs))
        return results

    def run(self, reps: int) -> List[Any]:
        """워커 메인 루프 (중단 신호를 받으면 현재 배치까지만)"""
        previous = self._install_signals()
        children = {name: seq.spawn(reps) for name, seq in self.streams.items()}
        results: List[Any] = []
        try:
            for start in range(0, reps, self.batch_size):
                if not self.running:
                    logger.warning(f"Replications interrupted after {len(results)} of {reps}")
                    break
                results.extend(self.process_batch(start, children))
                self.completed = len(results)
                logger.info(f"Replications: {self.completed}/{reps}")
        finally:
            self._restore_signals(previous)
        return results

    def _install_signals(self) -> Optional[dict]:
        if not self.handle_signals or threading.current_thread() is not threading.main_thread():
            return None
        previous = {
            signal.SIGINT: signal.getsignal(signal.SIGINT),
            signal.SIGTERM: signal.getsignal(signal.SIGTERM),
        }
        signal.signal(signal.SIGTERM, self._handle_shutdown)
        signal.signal(signal.SIGINT, self._handle_shutdown)
        return previous

    @staticmethod
    def _restore_signals(previous: Optional[dict]) -> None:
        if not previous:
            return
        for signum, handler in previous.items():
            signal.signal(signum, handler)

    def _handle_shutdown(self, signum, frame):
        """Graceful shutdown"""
        logger.warning("Shutdown signal received; finishing current batch")
        self.running = False
