import io

import boto3
import pytest
from botocore.response import StreamingBody
from botocore.stub import Stubber

from api.s3_storage import S3ReportStorage

BUCKET = 'holderbound-test'


@pytest.fixture
def stubbed():
    client = boto3.client('s3', region_name='eu-north-1', aws_access_key_id='testing',
                          aws_secret_access_key='testing')
    with Stubber(client) as stubber:
        yield S3ReportStorage(BUCKET, client=client), stubber
        stubber.assert_no_pending_responses()


def test_upload_report(stubbed):
    """Reports are stored as JSON under the prefix"""
    storage, stubber = stubbed
    stubber.add_response('put_object', {}, {'Bucket': BUCKET, 'Key': 'reports/abc.json', 'Body': b'{}\n',
                                            'ContentType': 'application/json'})
    assert storage.upload_report('abc', '{}\n')


def test_download_report(stubbed):
    """The body is returned as text"""
    storage, stubber = stubbed
    data = b'{"id": "abc"}\n'
    stubber.add_response('get_object', {'Body': StreamingBody(io.BytesIO(data), len(data))},
                         {'Bucket': BUCKET, 'Key': 'reports/abc.json'})
    assert storage.download_report('abc') == data.decode('utf-8')


def test_download_missing_report(stubbed):
    """A missing key is None, not an error"""
    storage, stubber = stubbed
    stubber.add_client_error('get_object', service_error_code='NoSuchKey', http_status_code=404)
    assert storage.download_report('nothing') is None


def test_download_other_errors_raise(stubbed):
    """Access errors propagate"""
    storage, stubber = stubbed
    stubber.add_client_error('get_object', service_error_code='AccessDenied', http_status_code=403)
    with pytest.raises(Exception):
        storage.download_report('abc')


def test_list_reports(stubbed):
    """Only .json keys under the prefix become ids"""
    storage, stubber = stubbed
    stubber.add_response('list_objects_v2', {'Contents': [{'Key': 'reports/abc.json'}, {'Key': 'reports/notes.txt'},
                                                          {'Key': 'reports/def.json'}]},
                         {'Bucket': BUCKET, 'Prefix': 'reports/'})
    assert storage.list_reports() == ['abc', 'def']


def test_delete_report(stubbed):
    """Deletes the prefixed key"""
    storage, stubber = stubbed
    stubber.add_response('delete_object', {}, {'Bucket': BUCKET, 'Key': 'reports/abc.json'})
    assert storage.delete_report('abc')


def test_custom_prefix():
    """Keys follow the configured prefix"""
    client = boto3.client('s3', region_name='eu-north-1', aws_access_key_id='testing',
                          aws_secret_access_key='testing')
    assert S3ReportStorage(BUCKET, client=client, prefix='archive/').key_for('x') == 'archive/x.json'
