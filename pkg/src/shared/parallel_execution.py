import logging
import threading

from src.shared.config import MAX_WORKERS

logger = logging.getLogger("debugger")


def execute_in_parallel(tasks, max_workers=MAX_WORKERS):
    """
    Run independent callables on worker threads and return their results in submission order.

    Parameters:
    - tasks (list): (callable, args) pairs.
    - max_workers (int): Number of threads alive at once; 1 runs inline.

    If any task raised, the exception of the lowest failing index is re-raised
    after every thread has been joined.
    """
    results = [None] * len(tasks)
    errors = [None] * len(tasks)

    if max_workers <= 1 or len(tasks) <= 1:
        for index, (task, args) in enumerate(tasks):
            task_wrapper(task, args, index, results, errors)
    else:
        for start in range(0, len(tasks), max_workers):
            threads = []
            for index in range(start, min(start + max_workers, len(tasks))):
                task, args = tasks[index]
                thread = threading.Thread(
                    target=task_wrapper, args=(task, args, index, results, errors)
                )
                threads.append(thread)
                thread.start()
            for thread in threads:
                thread.join()

    for error in errors:
        if error is not None:
            raise error
    return results


def task_wrapper(task, args, index, results, errors):
    try:
        results[index] = task(*args)
    except Exception as e:
        logger.debug(f"Task {index}: execution failed with error: {e}")
        errors[index] = e
