import os
import boto3
from dotenv import load_dotenv
from holderbound.config import ENV_PREFIX, AnalysisConfig
from holderbound.errors import ConfigError

SERVICE_KEYS = ('AWS_ACCESS_KEY_ID', 'AWS_SECRET_ACCESS_KEY', 'AWS_REGION', 'S3_BUCKET', 'REPORTS_DIR',
                'HOLDER_CONFIG', 'SECRET_KEY')
SECRET_KEYS = ('AWS_ACCESS_KEY_ID', 'AWS_SECRET_ACCESS_KEY', 'SECRET_KEY')


def check_env():
    load_dotenv()

    print("Checking environment variables:")
    for key in SERVICE_KEYS:
        value = os.getenv(key)
        status = "✓" if value else "✗"
        if value and key in SECRET_KEYS:
            value = value[:6] + '...'  # Show only first 6 characters
        print(f"{status} {key}: {value}")

    # Analysis overrides
    problems = 0
    overrides = {key: value for key, value in os.environ.items()
                 if key.startswith(ENV_PREFIX) and key != f"{ENV_PREFIX}CONFIG"}
    for key, value in sorted(overrides.items()):
        try:
            AnalysisConfig().with_overrides({key[len(ENV_PREFIX):]: value})
            print(f"✓ {key}: {value}")
        except ConfigError as e:
            problems += 1
            print(f"✗ {key}: {str(e)}")
    return problems


def check_s3(client=None):
    """Reach the report bucket, if one is configured"""
    bucket = os.getenv('S3_BUCKET')
    if not bucket:
        print("S3_BUCKET not set, reports stay on local disk")
        return True
    try:
        s3 = client or boto3.Session(
            aws_access_key_id=os.getenv('AWS_ACCESS_KEY_ID'),
            aws_secret_access_key=os.getenv('AWS_SECRET_ACCESS_KEY'),
            region_name=os.getenv('AWS_REGION', 'eu-north-1')
        ).client('s3')
        s3.head_bucket(Bucket=bucket)
        print("✓ Successfully connected to S3 bucket:", bucket)
        return True
    except Exception as e:
        print("✗ S3 connection failed:", str(e))
        return False


if __name__ == '__main__':
    check_env()
    check_s3()
