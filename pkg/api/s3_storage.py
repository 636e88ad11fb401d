import boto3
import logging
from typing import List, Optional


class S3ReportStorage:
    def __init__(self, bucket_name: str, session: Optional[boto3.Session] = None, prefix: str = 'reports/',
                 client=None):
        self.bucket_name = bucket_name
        self.prefix = prefix
        self.s3 = client or (session.client('s3') if session else boto3.client('s3'))
        logging.info(f"Initialized S3 connection to bucket {bucket_name}")

    def key_for(self, report_id: str) -> str:
        return f"{self.prefix}{report_id}.json"

    def upload_report(self, report_id: str, body: str) -> bool:
        """Upload a report document"""
        key = self.key_for(report_id)
        try:
            self.s3.put_object(Bucket=self.bucket_name, Key=key, Body=body.encode('utf-8'),
                               ContentType='application/json')
            logging.debug(f"Uploaded report to s3://{self.bucket_name}/{key}")
            return True
        except Exception as e:
            logging.error(f"Error uploading report to S3: {str(e)}")
            raise

    def download_report(self, report_id: str) -> Optional[str]:
        """Fetch a report document, None if the key does not exist"""
        key = self.key_for(report_id)
        try:
            response = self.s3.get_object(Bucket=self.bucket_name, Key=key)
            return response['Body'].read().decode('utf-8')
        except self.s3.exceptions.NoSuchKey:
            return None
        except Exception as e:
            logging.error(f"Error downloading report from S3: {str(e)}")
            raise

    def delete_report(self, report_id: str) -> bool:
        """Delete a report document"""
        try:
            self.s3.delete_object(Bucket=self.bucket_name, Key=self.key_for(report_id))
            logging.debug(f"Deleted s3://{self.bucket_name}/{self.key_for(report_id)}")
            return True
        except Exception as e:
            logging.error(f"Error deleting report from S3: {str(e)}")
            raise

    def list_reports(self) -> List[str]:
        """Report ids stored under the prefix"""
        try:
            ids = []
            paginator = self.s3.get_paginator('list_objects_v2')
            for page in paginator.paginate(Bucket=self.bucket_name, Prefix=self.prefix):
                for item in page.get('Contents', []):
                    name = item['Key'][len(self.prefix):]
                    if name.endswith('.json'):
                        ids.append(name[:-len('.json')])
            return ids
        except Exception as e:
            logging.error(f"Error listing reports in S3: {str(e)}")
            raise
