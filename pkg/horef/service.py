# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Refactoring service
#
# JSON over HTTP access to the pipeline:
#   GET  /horef/v1/               service root
#   POST /horef/v1/refactor       {program, targets?, max_ho_vars?, weights?, timeout_secs?, verify?}
#   POST /horef/v1/abstractions   {program, max_ho_vars?, keep_singletons?}
#   POST /horef/v1/check          {program, refactored, library?, targets?}

import g

import json
import logging
import traceback
from flask import request, make_response
from flask_restful import Resource

from .compressor import Weights
from .config import RunConfig
from .exceptions import (AbstractionError, ConfigurationError, ParseError,
                         SpecializationError, UnresolvedSymbolError, UniverseError)
from .pipeline import run_abstractions, run_check, run_refactor
from .report import emit_report
from .version import __version__

logger = logging.getLogger(__name__)


def error_response(msg, status):
    data = {
        'Status': status,
        'Message': '{}'.format(msg)
    }
    return data, status


INTERNAL_ERROR = error_response('Internal Server Error', 500)


@g.api.representation('application/json')
def output_json(data, code, headers=None):
    """
    Overriding how JSON is returned by the server so that it looks nice
    """
    resp = make_response(json.dumps(data, indent=4), code)
    resp.headers.extend(headers or {})
    return resp


def _config():
    return g.config or RunConfig()


def _overrides(body, config):
    """
    RunConfig with the optional request fields applied
    """
    targets = body.get('targets')
    if isinstance(targets, str):
        targets = tuple(t.strip() for t in targets.split(',') if t.strip())
    weights = body.get('weights')
    if isinstance(weights, str):
        weights = Weights.parse(weights)
    elif weights is not None:
        weights = Weights.parse(','.join(str(w) for w in weights))
    return config.override(
        targets=tuple(targets) if targets else None,
        max_ho_vars=body.get('max_ho_vars'),
        weights=weights,
        timeout_secs=body.get('timeout_secs'),
        verify=body.get('verify'),
        keep_singletons=body.get('keep_singletons'))


def _body():
    body = request.get_json(force=True, silent=True)
    assert isinstance(body, dict), 'No JSON request body given'
    assert isinstance(body.get('program'), str), 'Request body needs a "program" string'
    return body


def _diagnostics(e):
    return [str(d) for d in e.diagnostics]


class ServiceRootAPI(Resource):
    def get(self):
        config = _config()
        return {
            'Name': 'horef',
            'Version': __version__,
            'Defaults': {
                'max_ho_vars': config.max_ho_vars,
                'weights': list(config.weights.as_tuple()),
                'timeout_secs': config.timeout_secs,
                'verify': config.verify
            },
            'Links': [g.rest_base + 'refactor', g.rest_base + 'abstractions', g.rest_base + 'check']
        }, 200


class RefactorAPI(Resource):
    def post(self):
        logger.info('RefactorAPI POST called')
        try:
            body = _body()
            outcome = run_refactor(body['program'], _overrides(body, _config()))
            report = json.loads(emit_report(outcome.report))
            if not outcome.report.verified:
                resp = {'Status': 409, 'Message': 'Verification failed', 'program': outcome.text,
                        'report': report}, 409
            else:
                resp = {'program': outcome.text, 'report': report}, 200
        except (AssertionError, ConfigurationError) as e:
            resp = error_response(e, 400)
        except ParseError as e:
            resp = {'Status': 400, 'Message': str(e), 'Diagnostics': _diagnostics(e)}, 400
        except (UnresolvedSymbolError, SpecializationError, UniverseError) as e:
            resp = error_response(e, 422)
        except Exception:
            traceback.print_exc()
            resp = INTERNAL_ERROR
        return resp


class AbstractionsAPI(Resource):
    def post(self):
        logger.info('AbstractionsAPI POST called')
        try:
            body = _body()
            outcome = run_abstractions(body['program'], _overrides(body, _config()))
            resp = {
                'library': outcome.library,
                'enumerated': outcome.pool.enumerated,
                'candidates_before_filter': outcome.pool.raw_count,
                'candidates_after_filter': len(outcome.pool.abstractions)
            }, 200
        except (AssertionError, ConfigurationError, AbstractionError) as e:
            resp = error_response(e, 400)
        except ParseError as e:
            resp = {'Status': 400, 'Message': str(e), 'Diagnostics': _diagnostics(e)}, 400
        except Exception:
            traceback.print_exc()
            resp = INTERNAL_ERROR
        return resp


class CheckAPI(Resource):
    def post(self):
        logger.info('CheckAPI POST called')
        try:
            body = _body()
            assert isinstance(body.get('refactored'), str), 'Request body needs a "refactored" string'
            result = run_check(body['program'], body['refactored'], _overrides(body, _config()),
                               library_text=body.get('library'))
            data = {'equivalent': result.equivalent}
            if not result.equivalent:
                data['counterexample'] = str(result.counterexample)
                data['derived_by'] = result.derived_by
            resp = data, 200
        except (AssertionError, ConfigurationError) as e:
            resp = error_response(e, 400)
        except ParseError as e:
            resp = {'Status': 400, 'Message': str(e), 'Diagnostics': _diagnostics(e)}, 400
        except (UnresolvedSymbolError, SpecializationError, UniverseError) as e:
            resp = error_response(e, 422)
        except Exception:
            traceback.print_exc()
            resp = INTERNAL_ERROR
        return resp


_attached = False


def attach_resources():
    """
    Registers the service resources on g.api (once)
    """
    global _attached
    if _attached:
        return g.app
    api = g.api
    api.add_resource(ServiceRootAPI, g.rest_base)
    api.add_resource(RefactorAPI, g.rest_base + 'refactor')
    api.add_resource(AbstractionsAPI, g.rest_base + 'abstractions')
    api.add_resource(CheckAPI, g.rest_base + 'check')
    _attached = True
    return g.app
