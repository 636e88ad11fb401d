"""
Example configuration file for the holderbound report service.
Copy this file to config.py in the instance folder and update with your values.
"""

# AWS Configuration
AWS_ACCESS_KEY_ID = 'your-access-key-id'
AWS_SECRET_ACCESS_KEY = 'your-secret-access-key'
AWS_REGION = 'us-east-1'

# S3 Configuration (leave unset to keep reports on local disk only)
S3_BUCKET = 'holderbound-reports'

# Report storage
REPORTS_DIR = 'reports'

# Analysis defaults: a key = value file read on every request (see holderbound/config.py)
HOLDER_CONFIG = None

# Flask Configuration
SECRET_KEY = 'your-secret-key-here'  # Change this to a random secret key
DEBUG = False  # Set to True for development
