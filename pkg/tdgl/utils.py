''' tdgl utils file '''
# -*- coding: utf-8 -*-
import hashlib
import json

import numpy as np


def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def sha256_hex(payload):
    if isinstance(payload, str):
        payload = payload.encode('utf-8')
    return hashlib.sha256(payload).hexdigest()


def git_blob_hash(payload):
    ''' Content hash computed the way ``git hash-object`` does '''
    header = ('blob %d\0' % len(payload)).encode('ascii')
    return hashlib.sha1(header + payload).hexdigest()


def run_length_encode(flags):
    ''' Encode a flat boolean sequence as [first_value, run, run, ...] '''
    flags = np.asarray(flags, dtype=bool).ravel()
    if flags.size == 0:
        return [False]
    changes = np.flatnonzero(flags[1:] != flags[:-1]) + 1
    bounds = np.concatenate(([0], changes, [flags.size]))
    return [bool(flags[0])] + [int(n) for n in np.diff(bounds)]


def run_length_decode(encoded):
    value = bool(encoded[0])
    chunks = []
    for run in encoded[1:]:
        chunks.append(np.full(int(run), value, dtype=bool))
        value = not value
    if not chunks:
        return np.zeros(0, dtype=bool)
    return np.concatenate(chunks)
