"""Bandwidth-guaranteed traffic-engineering routing simulator."""
