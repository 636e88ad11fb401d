from .s3_storage import S3ReportStorage

__all__ = ['S3ReportStorage']
