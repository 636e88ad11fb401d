import os
from flask import Flask, jsonify, request
from analysis_system import AnalysisSystem
from holderbound import __version__
from holderbound.config import load_config
from holderbound.corpus import CORPUS, names
from holderbound.errors import ConfigError, HolderBoundError
from models import DomainSpec
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Initialize Flask app
app = Flask(__name__, instance_relative_config=True)
app.config.from_mapping(
    SECRET_KEY=os.environ.get('SECRET_KEY', 'dev'),
    AWS_ACCESS_KEY_ID=os.environ.get('AWS_ACCESS_KEY_ID'),
    AWS_SECRET_ACCESS_KEY=os.environ.get('AWS_SECRET_ACCESS_KEY'),
    AWS_REGION=os.environ.get('AWS_REGION', 'eu-north-1'),
    S3_BUCKET=os.environ.get('S3_BUCKET'),
    REPORTS_DIR=os.environ.get('REPORTS_DIR', 'reports'),
    HOLDER_CONFIG=os.environ.get('HOLDER_CONFIG')
)

# Load instance config if it exists
if os.path.exists(os.path.join(app.instance_path, 'config.py')):
    app.config.from_pyfile('config.py')

# Ensure instance folder exists
try:
    os.makedirs(app.instance_path)
except OSError:
    pass

# Initialize analysis system
analysis_system = AnalysisSystem(
    reports_dir=app.config['REPORTS_DIR'],
    s3_bucket=app.config['S3_BUCKET'],
    s3_region=app.config['AWS_REGION'],
    aws_access_key_id=app.config['AWS_ACCESS_KEY_ID'],
    aws_secret_access_key=app.config['AWS_SECRET_ACCESS_KEY']
)


def spec_from_request(payload):
    """DomainSpec from a JSON body carrying either a corpus name or domain, curve and eta"""
    config = load_config(app.config.get('HOLDER_CONFIG'), payload.get('options') or {})
    if payload.get('corpus'):
        if payload['corpus'] not in CORPUS:
            raise ConfigError(f"Unknown corpus entry {payload['corpus']!r}")
        return DomainSpec.from_corpus(payload['corpus'], config)
    missing = [key for key in ('domain', 'curve', 'eta') if payload.get(key) in (None, '')]
    if missing:
        raise ConfigError(f"Missing fields: {', '.join(missing)}")
    return DomainSpec.create(payload['domain'], payload['curve'], payload['eta'], config)


# Routes
@app.route('/')
def index():
    return jsonify({'service': 'holderbound', 'version': __version__, 'corpus': names()})

@app.route('/api/corpus')
def corpus():
    return jsonify([entry.to_dict() for entry in CORPUS.values()])

@app.route('/api/analyze', methods=['POST'])
def analyze():
    """Run the full pipeline on the posted domain and store the report"""
    payload = request.get_json(silent=True)
    if not isinstance(payload, dict):
        return jsonify({'error': 'Expected a JSON object'}), 400
    try:
        spec = spec_from_request(payload)
    except HolderBoundError as e:
        return jsonify({'error': str(e)}), 400

    app.logger.info(f"Analyzing {spec.name or 'custom domain'} with eta={spec.eta}")
    report = analysis_system.run_analysis(spec)
    report_id = analysis_system.save_report(report)
    if report['status'] == 'error':
        return jsonify({'id': report_id, 'error': report['error']['message'],
                        'stage': report['failed_stage']}), 422
    return jsonify({'id': report_id, 'report': report}), 201

@app.route('/api/reports')
def list_reports():
    return jsonify(analysis_system.list_reports())

@app.route('/api/reports/<report_id>')
def get_report(report_id):
    report = analysis_system.get_report(report_id)
    if not report:
        return jsonify({'error': 'Report not found'}), 404
    return jsonify(report)

@app.route('/api/reports/<report_id>', methods=['DELETE'])
def delete_report(report_id):
    if not analysis_system.delete_report(report_id):
        return jsonify({'error': 'Report not found'}), 404
    return jsonify({'deleted': report_id})

# Vercel requires the app variable to be exposed
if __name__ == '__main__':
    app.run(debug=True)
