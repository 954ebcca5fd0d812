from typing import List

import statemachine  # type: ignore


class ReplicateState(statemachine.StateMachine):
    """State machine describing the lifecycle of a single Monte Carlo replicate."""

    # states
    pending = statemachine.State("pending", initial=True)
    """The replicate has been scheduled but is not running yet."""

    running = statemachine.State("running")
    """The replicate was submitted to the worker pool."""

    finished = statemachine.State("finished")
    """The active region emptied; the record holds the terminal scoring."""

    capped = statemachine.State("capped")
    """The hard sample cap was hit before the active region emptied."""

    failed = statemachine.State("failed")

    # transitions
    start: statemachine.Transition = pending.to(running)
    finish: statemachine.Transition = running.to(finished)
    cap: statemachine.Transition = running.to(capped)
    fail: statemachine.Transition = failed.from_(pending, running)

    DONE = (finished, capped, failed)

    def __init__(self, replicate: int):
        super().__init__()
        self.replicate = replicate
        self.visited_states: List[statemachine.State] = []

    def on_enter_state(self, state: statemachine.State):
        self.visited_states.append(state)

    @property
    def done(self) -> bool:
        return self.current_state in self.DONE
