__all__ = ['job_schemas']
