from smoothcal.experiments.runners import ExperimentRunner, report_only_rows, run_fit, run_simulate, run_tailcheck

__all__ = ['ExperimentRunner', 'report_only_rows', 'run_fit', 'run_simulate', 'run_tailcheck']
