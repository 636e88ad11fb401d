import pytest


@pytest.fixture
def client(app):
    with app.test_client() as client:
        yield client


def analyze_half_space(client):
    return client.post('/api/analyze', json={'corpus': 'half_space', 'options': {'samples': 4000}})


def test_index_route(client):
    """Test the index route"""
    response = client.get('/')
    assert response.status_code == 200
    assert response.json['service'] == 'holderbound'
    assert 'e2' in response.json['corpus']


def test_corpus_route(client):
    """Test listing the corpus"""
    response = client.get('/api/corpus')
    assert response.status_code == 200
    names = [entry['name'] for entry in response.json]
    assert 'kohn_nirenberg' in names


def test_analyze_corpus_entry(client):
    """Test analyzing a named domain"""
    response = analyze_half_space(client)
    assert response.status_code == 201
    assert response.json['report']['verdict']['bound'] == '1/4'


def test_analyze_custom_domain(client):
    """Test analyzing a posted defining function"""
    response = client.post('/api/analyze', json={'domain': 'Re(z3) + abs2(z2)^4', 'curve': 't, 0, 0', 'eta': 6,
                                                 'options': {'samples': 4000}})
    assert response.status_code == 201
    assert response.json['report']['normal_form']['branch'] == 'krantz'


def test_analyze_bad_domain(client):
    """Test a syntax error in the posted domain"""
    response = client.post('/api/analyze', json={'domain': 'Re(z3) + * z1', 'curve': 't, 0, 0', 'eta': 4})
    assert response.status_code == 400
    assert 'column 10' in response.json['error']


def test_analyze_missing_fields(client):
    """Test a request without curve and eta"""
    response = client.post('/api/analyze', json={'domain': 'Re(z3)'})
    assert response.status_code == 400
    assert 'curve' in response.json['error']


def test_analyze_not_json(client):
    """Test a form-encoded request"""
    response = client.post('/api/analyze', data={'corpus': 'e2'})
    assert response.status_code == 400


def test_analyze_bad_option(client):
    """Test an unknown analysis option"""
    response = client.post('/api/analyze', json={'corpus': 'e2', 'options': {'sample': 10}})
    assert response.status_code == 400


def test_analyze_stage_error(client):
    """Test a curve whose contact order is below eta"""
    response = client.post('/api/analyze', json={'domain': 'Re(z3) + abs2(z2) + abs2(z1)', 'curve': 't, 0, 0',
                                                 'eta': 4})
    assert response.status_code == 422
    assert response.json['stage'] == 'normal_form'


def test_reports(client):
    """Test listing, fetching and deleting stored reports"""
    report_id = analyze_half_space(client).json['id']

    response = client.get('/api/reports')
    assert [record['id'] for record in response.json] == [report_id]

    response = client.get(f'/api/reports/{report_id}')
    assert response.status_code == 200
    assert response.json['id'] == report_id

    response = client.delete(f'/api/reports/{report_id}')
    assert response.json['deleted'] == report_id
    assert client.get(f'/api/reports/{report_id}').status_code == 404


def test_missing_report(client):
    """Test fetching and deleting an unknown report"""
    assert client.get('/api/reports/0123456789abcdef').status_code == 404
    assert client.delete('/api/reports/0123456789abcdef').status_code == 404
