__all__ = ['config', 'errors', 'monitoring']
