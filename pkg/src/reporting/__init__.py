from .metrics import (METRIC_COLUMNS, SUMMARY, MetricsWriter, compare, format_comparison, read_config, read_metrics,
                      reports_to_frame)

__all__ = ['METRIC_COLUMNS', 'SUMMARY', 'MetricsWriter', 'compare', 'format_comparison', 'read_config',
           'read_metrics', 'reports_to_frame']
