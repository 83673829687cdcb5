# -*- coding: utf-8 -*-
# Generated by the protocol buffer compiler.  DO NOT EDIT!
# NO CHECKED-IN PROTOBUF GENCODE
# source: dg/v1/state.proto
# Protobuf Python Version: 6.31.1
"""Generated protocol buffer code."""
from google.protobuf import descriptor as _descriptor
from google.protobuf import descriptor_pool as _descriptor_pool
from google.protobuf import runtime_version as _runtime_version
from google.protobuf import symbol_database as _symbol_database
from google.protobuf.internal import builder as _builder
_runtime_version.ValidateProtobufRuntimeVersion(
    _runtime_version.Domain.PUBLIC,
    6,
    31,
    1,
    '',
    'dg/v1/state.proto'
)
# @@protoc_insertion_point(imports)

_sym_db = _symbol_database.Default()




DESCRIPTOR = _descriptor_pool.Default().AddSerializedFile(b'\n\x11\x64g/v1/state.proto\x12\x05\x64g.v1\"O\n\x04\x42ond\x12\n\n\x02id\x18\x01 \x01(\r\x12\x10\n\x08incoming\x18\x02 \x01(\x08\x12\x0e\n\x06length\x18\x03 \x01(\x01\x12\n\n\x02\x64x\x18\x04 \x01(\x01\x12\r\n\x05\x61lpha\x18\x05 \x01(\x01\"\'\n\tStarGraph\x12\x1a\n\x05\x62onds\x18\x01 \x03(\x0b\x32\x0b.dg.v1.Bond\"\'\n\rComplexSeries\x12\n\n\x02re\x18\x01 \x03(\x01\x12\n\n\x02im\x18\x02 \x03(\x01\"b\n\tBondState\x12\x0f\n\x07\x62ond_id\x18\x01 \x01(\r\x12!\n\x03phi\x18\x02 \x01(\x0b\x32\x14.dg.v1.ComplexSeries\x12!\n\x03\x63hi\x18\x03 \x01(\x0b\x32\x14.dg.v1.ComplexSeries\"b\n\rBoundaryTrace\x12\x0b\n\x03key\x18\x01 \x01(\t\x12!\n\x03phi\x18\x02 \x01(\x0b\x32\x14.dg.v1.ComplexSeries\x12!\n\x03\x63hi\x18\x03 \x01(\x0b\x32\x14.dg.v1.ComplexSeries\"\xf2\x01\n\nCheckpoint\x12\x1f\n\x05graph\x18\x01 \x01(\x0b\x32\x10.dg.v1.StarGraph\x12\x0c\n\x04mass\x18\x02 \x01(\x01\x12\n\n\x02\x64t\x18\x03 \x01(\x01\x12\x12\n\ntime_level\x18\x04 \x01(\x04\x12\x13\n\x0bvertex_mode\x18\x05 \x01(\t\x12\x0e\n\x06kernel\x18\x06 \x01(\t\x12\x11\n\tend_modes\x18\x07 \x03(\t\x12\x1f\n\x05\x62onds\x18\x08 \x03(\x0b\x32\x10.dg.v1.BondState\x12$\n\x06traces\x18\t \x03(\x0b\x32\x14.dg.v1.BoundaryTrace\x12\x16\n\x0ereference_norm\x18\n \x01(\x01\x62\x06proto3')

_globals = globals()
_builder.BuildMessageAndEnumDescriptors(DESCRIPTOR, _globals)
_builder.BuildTopDescriptorsAndMessages(DESCRIPTOR, 'dg.v1.state_pb2', _globals)
if not _descriptor._USE_C_DESCRIPTORS:
  DESCRIPTOR._loaded_options = None
  _globals['_BOND']._serialized_start=28
  _globals['_BOND']._serialized_end=107
  _globals['_STARGRAPH']._serialized_start=109
  _globals['_STARGRAPH']._serialized_end=148
  _globals['_COMPLEXSERIES']._serialized_start=150
  _globals['_COMPLEXSERIES']._serialized_end=189
  _globals['_BONDSTATE']._serialized_start=191
  _globals['_BONDSTATE']._serialized_end=289
  _globals['_BOUNDARYTRACE']._serialized_start=291
  _globals['_BOUNDARYTRACE']._serialized_end=389
  _globals['_CHECKPOINT']._serialized_start=392
  _globals['_CHECKPOINT']._serialized_end=634
# @@protoc_insertion_point(module_scope)
