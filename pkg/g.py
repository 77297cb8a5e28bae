# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Declares global variables
#
# The Flask app and the RESTful API shared by refactor.py (serve) and
# horef/service.py.

from flask import Flask
from flask_restful import Api

# Base URI of the service
rest_base = '/horef/v1/'

# Settings from horef-config.json, set by the serve command
config = None

# Create Flask server
app = Flask(__name__)

# Create RESTful API
api = Api(app)
