"""Bandlimited field and flow-map files"""
