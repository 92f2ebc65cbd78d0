# tasks/progress_estimation.py
from tqdm import tqdm

# Global progress bar
progress_bar = None


def initialize_progress_bar(total_tasks, desc="Progress", enabled=True):
    """
    Initialize a progress bar on stderr.
    With enabled=False no bar is drawn and updates are no-ops.
    """
    global progress_bar
    finalize_progress_bar()
    progress_bar = tqdm(total=total_tasks, desc=desc, unit="task", disable=not enabled)
    return progress_bar


def update_progress_bar(completed=1, **postfix):
    """
    Advance the progress bar and optionally show key figures next to it.
    """
    if progress_bar is not None:
        progress_bar.update(completed)
        if postfix:
            progress_bar.set_postfix(postfix, refresh=False)


def finalize_progress_bar():
    global progress_bar
    if progress_bar is not None:
        progress_bar.close()
        progress_bar = None
