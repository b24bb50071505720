"""Bounded litmus-test checker for declarative RDMA memory models."""

__version__ = "0.1.0"
