# sktpol - Parsers
